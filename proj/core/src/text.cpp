#include "uwbfp/text.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "uwbfp/error.hpp"

namespace uwbfp::text {

std::string format_exact(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 512> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
  if (res.ec != std::errc{}) {
    throw Error(Errc::InvalidArgument, "value too large to format");
  }
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view field, std::string_view what) {
  const std::string_view s = trim(field);
  double value = 0.0;
  const char* first = s.data();
  // from_chars rejects a leading '+'.
  if (!s.empty() && s.front() == '+') {
    ++first;
  }
  const auto res = std::from_chars(first, s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(Errc::Parse, "invalid " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

long long parse_integer(std::string_view field, std::string_view what) {
  const std::string_view s = trim(field);
  long long value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(Errc::Parse, "invalid " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < s.size()) {
    auto pos = s.find('\n', start);
    if (pos == std::string_view::npos) {
      pos = s.size();
    }
    std::string_view line = s.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    out.push_back(line);
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) {
    throw Error(Errc::Io, "failed writing '" + path + "'");
  }
}

}  // namespace uwbfp::text
