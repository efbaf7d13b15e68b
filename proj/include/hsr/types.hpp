#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hsr {

// Sites are stored one per row: an n x d matrix.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Raised when n <= rank, so residual degrees of freedom vanish and
/// interval estimates are unavailable.
class DegenerateDof : public Error {
public:
	using Error::Error;
};

} // namespace hsr
