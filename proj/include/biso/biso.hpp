#ifndef BISO_BISO_HPP
#define BISO_BISO_HPP

#include "matrix.hpp"
#include "rng.hpp"
#include "permutation.hpp"
#include "matrix_class.hpp"
#include "sampling.hpp"
#include "isotonic.hpp"
#include "graph.hpp"
#include "estimators.hpp"
#include "evaluation.hpp"
#include "cone_testing.hpp"
#include "experiment.hpp"

#endif  // BISO_BISO_HPP
