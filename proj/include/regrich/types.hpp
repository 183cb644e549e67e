#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace regrich {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Numerical policy shared by all modules.  Rank decisions are made by
/// singular-value thresholding at rank_tol_rel * sigma_max; entry-level
/// zero tests use zero_tol_abs scaled by the ambient magnitude.
struct ToleranceConfig {
    double rank_tol_rel = 1e-9;
    double zero_tol_abs = 1e-10;
    int max_power_for_roots_of_unity = 60;
    /// Eigenvalue clustering tolerance, relative to the matrix norm.
    double cluster_tol_rel = 1e-6;
    /// Seed for every randomized search in the library (reproducibility).
    std::uint64_t seed = 20240915ULL;
};

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error("dimension error: " + m) {}
};
struct SingularMatrixError : Error {
    explicit SingularMatrixError(const std::string& m) : Error("singular matrix: " + m) {}
};
struct ZeroVectorError : Error {
    explicit ZeroVectorError(const std::string& m) : Error("zero vector: " + m) {}
};
struct PartitionError : Error {
    explicit PartitionError(const std::string& m) : Error("partition error: " + m) {}
};
struct ExactnessError : Error {
    explicit ExactnessError(const std::string& m) : Error("exactness error: " + m) {}
};
struct OrderingError : Error {
    explicit OrderingError(const std::string& m) : Error("ordering error: " + m) {}
};
struct UnsupportedClassError : Error {
    explicit UnsupportedClassError(const std::string& m) : Error("unsupported class: " + m) {}
};
struct ConstructionError : Error {
    explicit ConstructionError(const std::string& m) : Error("construction failed: " + m) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& m) : Error("format error: " + m) {}
};

}  // namespace regrich
