#ifndef MOREAU_MOREAU_HPP_
#define MOREAU_MOREAU_HPP_

#include "moreau/diagnostics.hpp"
#include "moreau/experiments.hpp"
#include "moreau/io.hpp"
#include "moreau/licq.hpp"
#include "moreau/pieces.hpp"
#include "moreau/piecewise.hpp"
#include "moreau/problem.hpp"
#include "moreau/solvers.hpp"

#endif  // MOREAU_MOREAU_HPP_
