#ifndef CONTACTQD_CONTACTQD_HPP
#define CONTACTQD_CONTACTQD_HPP

#include "contactqd/analysis.hpp"
#include "contactqd/csv.hpp"
#include "contactqd/dynamics.hpp"
#include "contactqd/errors.hpp"
#include "contactqd/geometry.hpp"
#include "contactqd/master_equation.hpp"
#include "contactqd/operators.hpp"
#include "contactqd/rk45.hpp"
#include "contactqd/rng.hpp"
#include "contactqd/scenario.hpp"
#include "contactqd/state_space.hpp"
#include "contactqd/verify.hpp"

#endif
