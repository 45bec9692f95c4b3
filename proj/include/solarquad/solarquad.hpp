#pragma once

#include "band.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "gauss_kronrod.hpp"
#include "rulegen.hpp"
#include "spectrum.hpp"
#include "spline.hpp"
#include "tridiagonal.hpp"
#include "validate.hpp"
#include "rule_io.hpp"
