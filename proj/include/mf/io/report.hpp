#pragma once

#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "mf/io/json_io.hpp"

namespace mf::io {

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InconsistencyError("sha256 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

// Command report: input digests, results and caveats. Holds nothing run-dependent, so
// identical inputs give byte-identical output.
struct Report {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  std::vector<std::string> caveats;
  json trace;  // null unless tracing was requested

  void add_input(const std::filesystem::path& p) { inputs[p.generic_string()] = "sha256:" + sha256_hex(read_file(p)); }

  json to_json() const {
    json j{{"command", command}, {"inputs", inputs}, {"results", results}, {"caveats", caveats}};
    if (!trace.is_null()) j["trace"] = trace;
    return j;
  }
};

namespace detail {

inline void text_lines(std::ostringstream& os, const json& j, const std::string& prefix) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) text_lines(os, v, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) text_lines(os, j[i], prefix + "[" + std::to_string(i) + "]");
  } else {
    os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace detail

inline std::string render(const Report& r, bool as_text) {
  if (!as_text) return canonical_dump(r.to_json());
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  detail::text_lines(os, r.results, "");
  for (const auto& c : r.caveats) os << "caveat: " << c << "\n";
  return os.str();
}

}  // namespace mf::io
