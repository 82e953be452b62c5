#include "mcdt_cli/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mcdt/format.hpp"

namespace mcdt::cli {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ObservationTable read_observations(std::istream& in, std::size_t expected_k) {
  ObservationTable t;
  t.k = expected_k;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (first) {
      first = false;
      if (!parse_double(cells.front())) {
        for (std::size_t j = 0; j < cells.size(); ++j)
          if (trim(cells[j]) != "z" + std::to_string(j + 1))
            throw DataError("line " + std::to_string(lineno) + ": header must read z1,...,zk");
        if (t.k != 0 && cells.size() != t.k)
          throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.k) + " columns, got " +
                          std::to_string(cells.size()));
        t.k = cells.size();
        continue;
      }
    }
    if (t.k == 0) t.k = cells.size();
    if (cells.size() != t.k)
      throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.k) + " columns, got " +
                      std::to_string(cells.size()));
    std::vector<double> row(t.k);
    for (std::size_t j = 0; j < t.k; ++j) {
      const auto v = parse_double(cells[j]);
      if (!v || !std::isfinite(*v))
        throw DataError("line " + std::to_string(lineno) + ": column " + std::to_string(j + 1) +
                        " is not a finite number: '" + std::string(trim(cells[j])) + "'");
      row[j] = *v;
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string observation_header(std::size_t k, bool with_actions) {
  std::string s;
  for (std::size_t j = 0; j < k; ++j) s += (j ? ",z" : "z") + std::to_string(j + 1);
  if (with_actions)
    for (std::size_t j = 0; j < k; ++j) s += ",a" + std::to_string(j + 1);
  return s;
}

std::string format_row(const std::vector<double>& z) {
  std::string s;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j) s += ',';
    s += format_double(z[j]);
  }
  return s;
}

std::string format_row(const std::vector<double>& z, const ActionVector& a) {
  std::string s = format_row(z);
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] ? ",1" : ",0";
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
  if (!out) throw DataError("write failed for " + p.string());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 0xf];
  }
  return s;
}

std::filesystem::path manifest_path(const std::filesystem::path& out) {
  return std::filesystem::path(out.string() + ".manifest.json");
}

std::string to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "mcdt";
  j["version"] = m.version;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["out"] = m.out;
  j["cwd"] = m.cwd;
  auto& params = j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  auto& seeds = j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.seeds) seeds[k] = v;
  j["started_utc"] = m.started_utc;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  auto& outs = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : m.digests) outs.push_back({{"path", path}, {"sha256", digest}});
  return j.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  try {
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.command = j.at("command").get<std::string>();
    m.out = j.at("out").get<std::string>();
    m.cwd = j.value("cwd", "");
    m.version = j.value("version", "");
    for (const auto& o : j.at("outputs")) m.digests.emplace_back(o.at("path"), o.at("sha256"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest is missing fields: ") + e.what());
  }
  return m;
}

}  // namespace mcdt::cli
