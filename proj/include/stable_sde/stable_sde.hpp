#pragma once

#include "coeff_lang.hpp"
#include "coefficients.hpp"
#include "config.hpp"
#include "driving_noise.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "exponents.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "sde_engine.hpp"
#include "stable_measure.hpp"
