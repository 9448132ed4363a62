#ifndef NLCH_NLCH_HPP_
#define NLCH_NLCH_HPP_

#include "nlch/experiments.hpp"
#include "nlch/grid.hpp"
#include "nlch/io.hpp"
#include "nlch/kernel.hpp"
#include "nlch/local_op.hpp"
#include "nlch/nonlocal_op.hpp"
#include "nlch/norms.hpp"
#include "nlch/parallel.hpp"
#include "nlch/potentials.hpp"
#include "nlch/rate.hpp"
#include "nlch/solvers.hpp"
#include "nlch/spectral.hpp"
#include "nlch/test_functions.hpp"

#endif // NLCH_NLCH_HPP_
