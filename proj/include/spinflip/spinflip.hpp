#pragma once

#include "config.hpp"
#include "disorder.hpp"
#include "gibbs.hpp"
#include "identities.hpp"
#include "interpolation.hpp"
#include "martingale.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "replica.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "suites.hpp"
