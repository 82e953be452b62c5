#pragma once

// CSV observation files, run manifests and output digests.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "mcdt/error.hpp"
#include "mcdt/model.hpp"

namespace mcdt::cli {

/// Malformed input data; carries the offending line when known.
class DataError : public Error {
 public:
  using Error::Error;
};

struct ObservationTable {
  std::size_t k = 0;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated rows with an optional `z1,...,zk` header. `expected_k`
/// of 0 accepts the width of the first row. Throws DataError naming the line.
ObservationTable read_observations(std::istream& in, std::size_t expected_k = 0);

std::string observation_header(std::size_t k, bool with_actions);
std::string format_row(const std::vector<double>& z);
std::string format_row(const std::vector<double>& z, const ActionVector& a);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct Manifest {
  std::vector<std::string> argv;  ///< arguments after the program name
  std::string command;
  std::string out;
  std::string cwd;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::string version;
  double wall_clock_seconds = 0.0;
  std::string started_utc;
  std::vector<std::pair<std::string, std::string>> digests;  ///< path, sha256
};

std::filesystem::path manifest_path(const std::filesystem::path& out);
std::string to_json(const Manifest& m);
Manifest parse_manifest(const std::string& json_text);

}  // namespace mcdt::cli
