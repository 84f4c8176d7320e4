#pragma once

// Guaranteed reachability underapproximation for unknown control-affine
// systems on Riemannian manifolds: chart geometry, velocity-ball guarantees,
// surrogate propagation, and validation against known dynamics.

#include "grs/bounds.hpp"
#include "grs/expr.hpp"
#include "grs/geodesic.hpp"
#include "grs/gvs.hpp"
#include "grs/manifold.hpp"
#include "grs/manifolds/circle.hpp"
#include "grs/manifolds/euclidean.hpp"
#include "grs/manifolds/so3.hpp"
#include "grs/metric.hpp"
#include "grs/random.hpp"
#include "grs/reach.hpp"
#include "grs/runner.hpp"
#include "grs/scenario.hpp"
#include "grs/transport.hpp"
#include "grs/types.hpp"
