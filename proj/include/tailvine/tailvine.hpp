#pragma once

#include "tailvine/bicop/bicop.hpp"
#include "tailvine/bicop/contour.hpp"
#include "tailvine/bicop/fit.hpp"
#include "tailvine/dvine/dvine.hpp"
#include "tailvine/dvine/fit.hpp"
#include "tailvine/dvine/summary.hpp"
#include "tailvine/io/config.hpp"
#include "tailvine/io/csv.hpp"
#include "tailvine/io/serialize.hpp"
#include "tailvine/lqr/lqr.hpp"
#include "tailvine/margins/margins.hpp"
#include "tailvine/margins/mixture.hpp"
#include "tailvine/margins/select.hpp"
#include "tailvine/risk/risk.hpp"
