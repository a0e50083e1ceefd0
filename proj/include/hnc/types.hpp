#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hnc {

using Real = double;
using Index = std::int64_t;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data: materials, scenario keys, file contents.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mesh connectivity problems (dangling facets, inverted elements).
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Element-level failure during assembly; carries the offending element.
class AssemblyError : public Error {
public:
    AssemblyError(const std::string& what, Index element)
        : Error(what + " (element " + std::to_string(element) + ")"), element_(element) {}
    Index element() const { return element_; }

private:
    Index element_;
};

/// Linear solve failure (singular or inaccurate factorization).
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace hnc
