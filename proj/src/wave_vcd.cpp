#include "rtlagent/wave/vcd.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace rtlagent::wave {

namespace {

struct Cursor {
  std::string_view data;
  std::size_t pos = 0;

  void skip_ws()
  {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos])))
      ++pos;
  }

  bool done()
  {
    skip_ws();
    return pos >= data.size();
  }

  // Next whitespace-delimited token; empty at end of input.
  std::string_view token()
  {
    skip_ws();
    const auto start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])))
      ++pos;
    return data.substr(start, pos - start);
  }

  // Consumes tokens through the closing $end of a header section.
  std::string consume_until_end()
  {
    std::string body;
    while (true) {
      if (done())
        throw VcdFormatError(pos, "section not closed by $end");
      auto t = token();
      if (t == "$end")
        return body;
      if (!body.empty())
        body += ' ';
      body += t;
    }
  }
};

bool is_4state(char c)
{
  return c == '0' || c == '1' || c == 'x' || c == 'z';
}

char normalize_bit(std::size_t offset, char c)
{
  const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!is_4state(lc))
    throw VcdFormatError(offset, std::string("invalid value bit '") + c + "'");
  return lc;
}

/// Left-extends `bits` to `width` per IEEE 1364: 0-extend unless the
/// leading bit is x/z, which extends with itself.
std::string normalize_width(std::size_t offset, std::string bits, int width)
{
  if (static_cast<int>(bits.size()) > width) {
    // A leading run of an extension bit may be dropped by writers; anything
    // else genuinely exceeds the declared width.
    const auto extra = bits.size() - static_cast<std::size_t>(width);
    const char lead = bits[0];
    for (std::size_t i = 0; i < extra; ++i)
      if (bits[i] != lead || (lead != '0' && lead != 'x' && lead != 'z'))
        throw VcdFormatError(offset, "value wider than declared width");
    return bits.substr(extra);
  }
  if (static_cast<int>(bits.size()) == width)
    return bits;
  const char lead = bits.empty() ? 'x' : bits[0];
  const char ext = (lead == 'x' || lead == 'z') ? lead : '0';
  return std::string(static_cast<std::size_t>(width) - bits.size(), ext) + bits;
}

}  // namespace

std::string WaveDb::value_at(const std::string& full_name, std::uint64_t t) const
{
  const auto* sig = find(full_name);
  const auto it = changes.find(full_name);
  const int width = sig ? sig->width : 1;
  std::string result(static_cast<std::size_t>(width), 'x');
  if (it == changes.end())
    return result;
  for (const auto& ch : it->second) {
    if (ch.time > t)
      break;
    result = ch.value;
  }
  return result;
}

WaveDb parse_vcd(std::string_view data)
{
  WaveDb db;
  Cursor cur{data};

  std::vector<std::string> scope;
  std::map<std::string, int> width_of_id;
  bool saw_enddefinitions = false;

  // --- header ---------------------------------------------------------
  while (true) {
    if (cur.done())
      break;
    const auto section_pos = cur.pos;
    auto t = cur.token();
    if (t == "$enddefinitions") {
      cur.consume_until_end();
      saw_enddefinitions = true;
      break;
    }
    if (t == "$timescale") {
      auto body = cur.consume_until_end();
      std::istringstream is(body);
      int mag = 0;
      std::string unit;
      is >> mag >> unit;
      if (unit.empty()) {
        // "1ns" written as one token
        std::size_t i = 0;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i])))
          ++i;
        mag = i ? std::stoi(body.substr(0, i)) : 0;
        unit = body.substr(i);
      }
      if (mag == 0 || unit.empty())
        throw VcdFormatError(section_pos, "malformed $timescale");
      db.timescale_mag = mag;
      db.timescale_unit = unit;
      continue;
    }
    if (t == "$scope") {
      auto kind = cur.token();
      auto name = cur.token();
      if (name == "$end" || kind == "$end")
        throw VcdFormatError(section_pos, "malformed $scope");
      if (cur.token() != "$end")
        throw VcdFormatError(section_pos, "$scope not closed by $end");
      scope.push_back(std::string(name));
      continue;
    }
    if (t == "$upscope") {
      cur.consume_until_end();
      if (scope.empty())
        throw VcdFormatError(section_pos, "$upscope without open scope");
      scope.pop_back();
      continue;
    }
    if (t == "$var") {
      auto type = std::string(cur.token());
      auto width_tok = std::string(cur.token());
      auto id = std::string(cur.token());
      auto ref = std::string(cur.token());
      // optional bit-range token before $end, e.g. "bus [7:0]"
      auto tail = cur.token();
      if (tail != "$end") {
        if (cur.token() != "$end")
          throw VcdFormatError(section_pos, "$var not closed by $end");
      }
      if (type == "real" || type == "realtime")
        throw VcdFormatError(section_pos, "real-valued variables are not supported");
      int width = 0;
      try {
        width = std::stoi(width_tok);
      } catch (...) {
        throw VcdFormatError(section_pos, "malformed $var width");
      }
      if (width <= 0 || id.empty() || ref.empty())
        throw VcdFormatError(section_pos, "malformed $var");

      std::string full;
      for (const auto& s : scope)
        full += s + ".";
      full += ref;

      if (db.find(full))
        throw DuplicateIdCode("signal '" + full + "' declared twice");
      const auto wit = width_of_id.find(id);
      if (wit != width_of_id.end() && wit->second != width)
        throw DuplicateIdCode("id code '" + id + "' redeclared with a different width");
      width_of_id[id] = width;
      db.signals.push_back({full, width, id});
      continue;
    }
    if (!t.empty() && t[0] == '$') {
      // $date, $version, $comment, ...
      cur.consume_until_end();
      continue;
    }
    throw VcdFormatError(section_pos, "unexpected token '" + std::string(t) + "' in header");
  }
  if (!saw_enddefinitions)
    throw VcdFormatError(cur.pos, "missing $enddefinitions");

  // --- value changes ----------------------------------------------------
  std::map<std::string, std::vector<Change>> by_id;
  std::uint64_t now = 0;
  bool saw_time = false;

  auto record = [&](std::size_t offset, const std::string& id, std::string value) {
    const auto wit = width_of_id.find(id);
    if (wit == width_of_id.end())
      throw VcdFormatError(offset, "value change for undeclared id '" + id + "'");
    value = normalize_width(offset, std::move(value), wit->second);
    auto& list = by_id[id];
    if (!list.empty() && list.back().time == now)
      list.back().value = std::move(value);  // same-time overwrite
    else if (!list.empty() && list.back().time > now)
      throw VcdFormatError(offset, "non-monotonic change time");
    else
      list.push_back({now, std::move(value)});
  };

  while (!cur.done()) {
    const auto pos0 = cur.pos;
    auto t = cur.token();
    if (t.empty())
      break;
    if (t[0] == '#') {
      std::uint64_t parsed = 0;
      try {
        parsed = std::stoull(std::string(t.substr(1)));
      } catch (...) {
        throw VcdFormatError(pos0, "malformed timestamp '" + std::string(t) + "'");
      }
      if (saw_time && parsed < now)
        throw VcdFormatError(pos0, "timestamps must not decrease");
      now = parsed;
      if (!saw_time) {
        db.begin_time = now;
        saw_time = true;
      }
      db.end_time = std::max(db.end_time, now);
      continue;
    }
    if (t == "$dumpvars" || t == "$dumpall" || t == "$dumpon" || t == "$dumpoff" ||
        t == "$end") {
      continue;  // changes inside dump sections parse like any others
    }
    if (t == "$comment") {
      cur.consume_until_end();
      continue;
    }
    const char c0 = static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
    if (c0 == 'b') {
      std::string bits;
      for (std::size_t i = 1; i < t.size(); ++i)
        bits += normalize_bit(pos0 + i, t[i]);
      if (bits.empty())
        throw VcdFormatError(pos0, "empty vector value");
      auto id = std::string(cur.token());
      if (id.empty())
        throw VcdFormatError(pos0, "vector value without id code");
      record(pos0, id, std::move(bits));
      continue;
    }
    if (c0 == 'r') {
      throw VcdFormatError(pos0, "real-valued change is not supported");
    }
    if (is_4state(c0)) {
      if (t.size() < 2)
        throw VcdFormatError(pos0, "scalar value without id code");
      record(pos0, std::string(t.substr(1)), std::string(1, c0));
      continue;
    }
    throw VcdFormatError(pos0, "unexpected token '" + std::string(t) + "'");
  }

  // Fan changes out to names; aliased ids share one stream.
  for (const auto& sig : db.signals) {
    const auto it = by_id.find(sig.id);
    db.changes[sig.name] = it == by_id.end() ? std::vector<Change>{} : it->second;
    if (!db.changes[sig.name].empty())
      db.end_time = std::max(db.end_time, db.changes[sig.name].back().time);
  }
  return db;
}

namespace {

std::string make_id(std::size_t index)
{
  // printable id codes, base 94 over '!'..'~'
  std::string id;
  do {
    id += static_cast<char>('!' + index % 94);
    index /= 94;
  } while (index > 0);
  return id;
}

std::vector<std::string> scope_of(const std::string& full)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full[i] == '.') {
      parts.push_back(full.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;  // the var's own name is not part of the scope
}

std::string base_of(const std::string& full)
{
  const auto dot = full.rfind('.');
  return dot == std::string::npos ? full : full.substr(dot + 1);
}

}  // namespace

std::string to_vcd(const WaveDb& db)
{
  std::ostringstream os;
  os << "$timescale " << db.timescale_mag << db.timescale_unit << " $end\n";

  std::vector<std::string> open;
  std::map<std::string, std::string> id_of;
  for (std::size_t i = 0; i < db.signals.size(); ++i) {
    const auto& sig = db.signals[i];
    const auto want = scope_of(sig.name);
    std::size_t common = 0;
    while (common < open.size() && common < want.size() && open[common] == want[common])
      ++common;
    while (open.size() > common) {
      os << "$upscope $end\n";
      open.pop_back();
    }
    for (std::size_t j = common; j < want.size(); ++j) {
      os << "$scope module " << want[j] << " $end\n";
      open.push_back(want[j]);
    }
    const auto id = make_id(i);
    id_of[sig.name] = id;
    os << "$var wire " << sig.width << " " << id << " " << base_of(sig.name) << " $end\n";
  }
  while (!open.empty()) {
    os << "$upscope $end\n";
    open.pop_back();
  }
  os << "$enddefinitions $end\n";

  std::map<std::uint64_t, std::vector<std::pair<std::string, std::string>>> groups;
  for (const auto& sig : db.signals) {
    const auto it = db.changes.find(sig.name);
    if (it == db.changes.end())
      continue;
    for (const auto& ch : it->second)
      groups[ch.time].push_back({id_of.at(sig.name), ch.value});
  }

  if (groups.empty() || groups.begin()->first > db.begin_time)
    os << "#" << db.begin_time << "\n";
  bool first = true;
  for (const auto& [time, entries] : groups) {
    os << "#" << time << "\n";
    if (first)
      os << "$dumpvars\n";
    for (const auto& [id, value] : entries) {
      if (value.size() == 1)
        os << value << id << "\n";
      else
        os << "b" << value << " " << id << "\n";
    }
    if (first)
      os << "$end\n";
    first = false;
  }
  if (groups.empty() || groups.rbegin()->first < db.end_time)
    os << "#" << db.end_time << "\n";
  return os.str();
}

}  // namespace rtlagent::wave
