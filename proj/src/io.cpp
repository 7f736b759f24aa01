#include "matfn/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace matfn::io {

namespace {

double parse_number(const std::string& token, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    throw IoError("line " + std::to_string(line) + ": '" + token + "' is not a number");
  return value;
}

}  // namespace

RealMatrix parse_dense_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    for (std::string tok; fields >> tok;) row.push_back(parse_number(tok, lineno));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix file contains no rows");
  try {
    return RealMatrix::from_rows(rows);
  } catch (const InvalidMatrix& e) {
    throw IoError(e.what());
  }
}

RealMatrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("rows"))
    throw IoError("JSON matrix must be an object with \"n\" and \"rows\"");
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() <= 0)
    throw IoError("\"n\" must be a positive integer");
  const auto n = doc["n"].get<std::size_t>();
  const auto& jrows = doc["rows"];
  if (!jrows.is_array() || jrows.size() != n)
    throw IoError("\"rows\" must be an array of " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> rows;
  for (const auto& jr : jrows) {
    if (!jr.is_array()) throw IoError("each row must be an array");
    std::vector<double> row;
    for (const auto& x : jr) {
      if (!x.is_number()) throw IoError("matrix entries must be numbers");
      row.push_back(x.get<double>());
    }
    rows.push_back(std::move(row));
  }
  try {
    return RealMatrix::from_rows(rows);
  } catch (const InvalidMatrix& e) {
    throw IoError(e.what());
  }
}

RealMatrix parse_matrix(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json(text);
  return parse_dense_text(text);
}

RealMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_matrix_file(const std::string& path, const RealMatrix& m, Format format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  if (format == Format::Json) out << to_json(m).dump() << '\n';
  else out << format_dense_text(m);
  if (!out) throw IoError("write failed for " + path);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_dense_text(const RealMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ' ';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"n", m.size()}, {"rows", rows}};
}

}  // namespace matfn::io
