#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace safeadapt {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Constraint normal' * z >= offset.
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};

// Solves Am' P + P Am = -Q. Throws NotHurwitz if the system is singular or
// the solution is not positive definite.
Mat solve_lyapunov(const Mat& Am, const Mat& Q);

// argmin (z - target)' W (z - target) subject to the half-spaces.
// W must be symmetric positive definite.
Vec qp_project(const Mat& W, const Vec& target, const std::vector<HalfSpace>& constraints);

double inv_erf(double y);

using VectorField = std::function<Vec(const Vec&)>;

Vec rk4_step(const VectorField& f, const Vec& x, double dt);

struct SymEig {
  Mat V;  // columns are eigenvectors
  Vec d;  // ascending
};

// Cyclic Jacobi; input is treated as symmetric PSD.
SymEig sym_eig(const Mat& P);

bool is_hurwitz(const Mat& A);

// Continuous-time LQR gain with the u = K x sign convention.
Mat lqr_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

}  // namespace safeadapt
