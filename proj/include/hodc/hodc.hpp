#pragma once

#include "multiindex.hpp"
#include "increments.hpp"
#include "trigpoly.hpp"
#include "grid_field.hpp"
#include "bump_series.hpp"
#include "form.hpp"
#include "operators.hpp"
#include "symbol.hpp"
#include "inequalities.hpp"
#include "io.hpp"
#include "verify.hpp"
#include "suite.hpp"
