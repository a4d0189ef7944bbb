#include "rtlagent/support/strings.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rtlagent::support {

std::string_view trim(std::string_view s)
{
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front()))
    s.remove_prefix(1);
  while (!s.empty() && is_space(s.back()))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0)
      out += sep;
    out += parts[i];
  }
  return out;
}

namespace {
bool ident_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '$';
}
}  // namespace

bool contains_whole_token(std::string_view text, std::string_view token)
{
  if (token.empty())
    return false;
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string_view::npos) {
    const bool left_ok = pos == 0 || !ident_char(text[pos - 1]);
    const std::size_t end = pos + token.size();
    const bool right_ok = end >= text.size() || !ident_char(text[end]);
    if (left_ok && right_ok)
      return true;
    pos += 1;
  }
  return false;
}

std::string fnv1a_hex(std::string_view data)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<std::string> extract_fenced_block(std::string_view text, std::string_view lang)
{
  std::optional<std::string> untagged;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos)
      break;
    auto tag_end = text.find('\n', open + 3);
    if (tag_end == std::string_view::npos)
      break;
    const auto tag = trim(text.substr(open + 3, tag_end - open - 3));
    const auto close = text.find("```", tag_end + 1);
    if (close == std::string_view::npos)
      break;
    std::string body{text.substr(tag_end + 1, close - tag_end - 1)};
    if (lang.empty() || tag == lang)
      return body;
    if (tag.empty() && !untagged)
      untagged = std::move(body);
    pos = close + 3;
  }
  return untagged;
}

std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write file: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out)
    throw std::runtime_error("short write: " + path.string());
}

std::string iso8601_now()
{
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms.count()));
  return buf;
}

std::filesystem::path make_temp_dir(std::string_view prefix)
{
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::ostringstream name;
    name << prefix << '-' << rd() << '-' << counter.fetch_add(1);
    const auto dir = base / name.str();
    std::error_code ec;
    if (std::filesystem::create_directories(dir, ec))
      return dir;
  }
  throw std::runtime_error("cannot create temp dir");
}

}  // namespace rtlagent::support
