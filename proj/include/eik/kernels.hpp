#pragma once

#include "eik/field.hpp"

namespace eik {

/// hbar and the constant reference forcing f~ of the unperturbed operator
/// (-hbar^2 Laplacian + f~^2).
struct KernelParams {
  double hbar = 1.0;
  double f_const = 1.0;
  int dimension = 2;

  void validate() const;
};

enum class ConvMode {
  zero_padded_linear,  // FFT on inputs padded to 2n-1 per axis
  circular,            // FFT on the unpadded grid, wraps at the edges
  direct,              // spatial-domain sum, exact to rounding per node
};

/// How to regularize the 2D and 3D singularity of the exact kernel at r = 0.
struct OriginRegularization {
  enum class Kind { half_cell, finite_cap } kind = Kind::half_cell;
  double cap = 0.0;  // used by finite_cap only

  static OriginRegularization half_cell() { return {}; }
  static OriginRegularization finite_cap(double value);
};

struct ConvPolicy {
  ConvMode mode = ConvMode::zero_padded_linear;
  OriginRegularization origin = OriginRegularization::half_cell();
  /// Worker threads for ConvMode::direct; results do not depend on it.
  int threads = 1;
};

enum class KernelKind { modified, exact };

/// Extent of a sampled kernel: every pairwise node offset (2n-1 per axis)
/// or the n-node grid itself, centred on node (n-1)/2.
enum class KernelExtent { offsets, same_grid };

double green_1d(double r, const KernelParams& p);
/// (1 / (2 pi hbar^2)) K0(f~ r / hbar); r must be positive.
double green_2d(double r, const KernelParams& p);
double green_3d(double r, const KernelParams& p);
/// exp(-f~ r / hbar), the prefactor-free surrogate of the Green's function.
double modified_green(double r, const KernelParams& p);

/// Asymptotic form of green_2d, valid for f~ r / hbar >> 0.25.
double green_2d_asymptotic(double r, const KernelParams& p);

/// Modified Bessel function of the second kind, order zero.
double bessel_k0(double x);

/// Kernel sampled radially around the centre of a 1D or 2D grid. The exact
/// 2D kernel takes the policy's origin regularization at r = 0.
ScalarField kernel_field(const GridSpec& grid, const KernelParams& p,
                         KernelKind which, const ConvPolicy& policy,
                         KernelExtent extent = KernelExtent::offsets);

/// out[x] = sum_y a[y] k[x - y], with the kernel centred at its middle node.
/// Linear modes accept any odd-sized kernel; circular mode needs the kernel
/// on a's own grid. With scale_by_cell the sum is multiplied by the cell
/// measure, turning it into a quadrature of the continuous convolution.
ScalarField convolve(const ScalarField& a, const ScalarField& kernel,
                     const ConvPolicy& policy, bool scale_by_cell);

}  // namespace eik
