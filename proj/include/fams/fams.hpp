#pragma once

#include <fams/core/errors.hpp>
#include <fams/core/geometry.hpp>
#include <fams/core/parallel.hpp>
#include <fams/core/rules.hpp>
#include <fams/core/summation.hpp>
#include <fams/eigen/embedding.hpp>
#include <fams/eigen/regime.hpp>
#include <fams/eigen/solution.hpp>
#include <fams/eigen/solvers.hpp>
#include <fams/harness/suites.hpp>
#include <fams/musielak/certify.hpp>
#include <fams/musielak/family.hpp>
#include <fams/musielak/sobolev_conjugate.hpp>
#include <fams/nonlocal/kirchhoff.hpp>
#include <fams/nonlocal/operator.hpp>
#include <fams/nonlocal/pair_quadrature.hpp>
#include <fams/nonlocal/setup.hpp>
#include <fams/spaces/discrete_function.hpp>
#include <fams/spaces/exponent_field.hpp>
#include <fams/spaces/luxemburg.hpp>
#include <fams/spaces/mesh.hpp>
#include <fams/spaces/modulars.hpp>
