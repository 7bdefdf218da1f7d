#ifndef AFDMSENSE_TYPES_HPP
#define AFDMSENSE_TYPES_HPP

#include <complex>
#include <Eigen/Dense>

namespace afdmsense {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kJ{0.0, 1.0};

}  // namespace afdmsense

#endif
