#ifndef BITEMP_COMMON_HPP_
#define BITEMP_COMMON_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitemp {

using Vec = std::vector<double>;

/// Thrown when an iterative solver fails to converge; carries the last
/// observed residual and the iteration count at abort.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  Vec row_vec(std::size_t i) const {
    return Vec(data.begin() + i * cols, data.begin() + (i + 1) * cols);
  }

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

/// Formats a double with enough digits to round-trip exactly through decimal.
std::string format_double(double x);

}  // namespace bitemp

#endif  // BITEMP_COMMON_HPP_
