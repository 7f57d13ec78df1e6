#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace causalaug {

// Base of every error thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration (CLI exit code 2).
struct config_error : error {
  using error::error;
};

// Bad or missing input data (CLI exit code 3).
struct data_error : error {
  using error::error;
};

// Numerical failure during computation (CLI exit code 4).
struct numerical_error : error {
  using error::error;
};

struct invalid_dimension_error : error {
  using error::error;
};

struct invalid_index_error : error {
  using error::error;
};

struct channel_mismatch_error : error {
  using error::error;
};

struct format_error : data_error {
  using data_error::data_error;
};

struct length_mismatch_error : data_error {
  length_mismatch_error(std::uint64_t expected, std::uint64_t actual)
      : data_error("length mismatch: expected " + std::to_string(expected) +
                   " bytes, got " + std::to_string(actual)),
        expected(expected),
        actual(actual) {}
  std::uint64_t expected;
  std::uint64_t actual;
};

struct insufficient_data_error : data_error {
  using data_error::data_error;
};

struct insufficient_domains_error : data_error {
  using data_error::data_error;
};

struct empty_dataset_error : data_error {
  using data_error::data_error;
};

struct singular_matrix_error : numerical_error {
  explicit singular_matrix_error(double rcond_estimate)
      : numerical_error("matrix is singular or ill-conditioned (rcond estimate " +
                        std::to_string(rcond_estimate) + ")"),
        rcond_estimate(rcond_estimate) {}
  double rcond_estimate;
};

struct divergence_error : numerical_error {
  explicit divergence_error(int epoch)
      : numerical_error("training loss became non-finite at epoch " + std::to_string(epoch)),
        epoch(epoch) {}
  int epoch;
};

}  // namespace causalaug
