#pragma once

// Matrix files: dense text (one row per line, whitespace-separated) or JSON
// ({"n": int, "rows": [[...], ...]}). Output uses 17 significant digits so
// every double round-trips exactly.

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "matfn/matrix.hpp"

namespace matfn::io {

enum class Format { DenseText, Json };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RealMatrix parse_dense_text(std::string_view text);
RealMatrix parse_json(std::string_view text);
/// Dispatches on content: JSON when the first non-blank character is '{'.
RealMatrix parse_matrix(std::string_view text);

RealMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const RealMatrix& m, Format format);

/// Shortest-exact decimal for a double (17 significant digits).
std::string format_number(double x);
std::string format_dense_text(const RealMatrix& m);
nlohmann::json to_json(const RealMatrix& m);

}  // namespace matfn::io
