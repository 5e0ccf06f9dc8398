#pragma once

// Warped products M1 x_f M2 with g = g1 + f^2 g2 on the product chart
// (base coordinates first). dim M2 = k.

#include <vector>

#include "solgeom/check.hpp"
#include "solgeom/fields.hpp"

namespace solgeom {

/// Which metric multiplies the bracket in the fiber Ricci block.
enum class FiberScaling { WarpedFiber, BareFiber };  // f^2 g2, g2
/// Pinned by the direct computation on S^2 = (0, pi) x_{sin} S^1.
inline constexpr FiberScaling kResolvedFiberScaling = FiberScaling::WarpedFiber;

inline constexpr double kMinWarping = 1e-6;

struct WarpedProduct {
  MetricField base;
  MetricField fiber;
  ScalarField f;  // on the base chart
  MetricField metric;  // assembled

  int base_dim() const { return base.dim(); }
  int fiber_dim() const { return fiber.dim(); }
  const Chart& chart() const { return metric.chart(); }
};

/// Throws InvalidInput when coordinate names collide or f < kMinWarping at a
/// sampled base point (`probe` points, seed 0).
WarpedProduct assemble(MetricField base, MetricField fiber, ScalarField f, int probe = 64);

/// Product-chart field from a base field and a fiber field.
VectorField product_field(const WarpedProduct& wp, const VectorField& w1, const VectorField& w2);

/// W1 must be a base field (dim n1) and W2 a fiber field (dim k), both written
/// in product coordinates; throws InvalidInput naming the component that
/// depends on the wrong block.
void verify_split(const WarpedProduct& wp, const VectorField& w1, const VectorField& w2, const PointSample& sample);

/// Direct Ricci of the assembled metric vs the base, mixed and fiber block
/// formulas. The fiber block is reported in both scalings; the unresolved one
/// is an info row.
std::vector<CheckReport> ricci_decomposition_check(const WarpedProduct& wp, const PointSample& sample, double tol);

/// Direct L_W L_W g vs L_{W1}L_{W1}g1 + [f^2 L_{W2}L_{W2}g2 + 2 W1(f^2) L_{W2}g2 + W1(W1(f^2)) g2].
std::vector<CheckReport> lie_expansion_check(const WarpedProduct& wp, const VectorField& w1, const VectorField& w2,
                                             const PointSample& sample, double tol);

/// Factor equations for a 2-Killing W and for a second soliton W on the product.
std::vector<CheckReport> prop_factor_checks(const WarpedProduct& wp, const VectorField& w1, const VectorField& w2,
                                            double lambda, const PointSample& sample, double tol);

}  // namespace solgeom
