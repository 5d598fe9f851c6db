#include <fstream>
#include <sstream>

#include "disambig/acquisition.hpp"
#include "disambig/minifn/parser.hpp"
#include "disambig/minifn/value_json.hpp"

namespace disambig::acquisition {

using nlohmann::json;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::S:
      return "S";
    case Variant::SP:
      return "SP";
    case Variant::SP1:
      return "SP1";
    case Variant::SPx:
      return "SPx";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view s) {
  for (auto v : {Variant::S, Variant::SP, Variant::SP1, Variant::SPx}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::vector<Type> FunctionSpec::param_types() const {
  std::vector<Type> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.type);
  return out;
}

std::string FunctionSpec::signature() const {
  std::string s = "fn " + name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) s += ", ";
    s += params[i].name + ": " + params[i].type.to_string();
  }
  return s + ") -> " + return_type.to_string();
}

std::string FunctionSpec::call(const std::vector<Value>& args) const {
  return name + "(" + minifn::args_literal(args) + ")";
}

void FunctionSpec::validate() const {
  if (name.empty()) throw SpecError("spec has no function name");
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (params[i].name == params[j].name) {
        throw SpecError("duplicate parameter '" + params[i].name + "'");
      }
    }
  }
  for (const auto& ex : examples) {
    if (ex.args.size() != params.size()) {
      throw SpecError("example " + call(ex.args) + " has wrong arity");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!minifn::conforms(ex.args[i], params[i].type)) {
        throw SpecError("example " + call(ex.args) + ": argument " +
                        std::to_string(i + 1) + " is not " +
                        params[i].type.to_string());
      }
    }
    if (ex.expected && !minifn::conforms(*ex.expected, return_type)) {
      throw SpecError("example " + call(ex.args) + ": expected value is not " +
                      return_type.to_string());
    }
  }
  if (!variant) return;
  bool has_purpose = purpose && !purpose->empty();
  switch (*variant) {
    case Variant::S:
      if (has_purpose || !examples.empty()) {
        throw SpecError("S variant takes neither purpose nor examples");
      }
      break;
    case Variant::SP:
      if (!has_purpose || !examples.empty()) {
        throw SpecError("SP variant needs a purpose and no examples");
      }
      break;
    case Variant::SP1:
      if (!has_purpose || examples.size() != 1) {
        throw SpecError("SP1 variant needs a purpose and exactly one example");
      }
      break;
    case Variant::SPx:
      if (!has_purpose || examples.size() < 2) {
        throw SpecError("SPx variant needs a purpose and at least two examples");
      }
      break;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Drops leading/trailing blank lines and the indentation common to the rest.
std::string dedent(const std::vector<std::string_view>& raw) {
  std::size_t first = 0, last = raw.size();
  while (first < last && trim(raw[first]).empty()) ++first;
  while (last > first && trim(raw[last - 1]).empty()) --last;
  std::size_t indent = std::string_view::npos;
  for (std::size_t i = first; i < last; ++i) {
    if (trim(raw[i]).empty()) continue;
    std::size_t n = raw[i].find_first_not_of(" \t");
    indent = std::min(indent, n);
  }
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    std::string_view line = raw[i];
    if (line.size() >= indent && indent != std::string_view::npos) {
      line.remove_prefix(indent);
    } else {
      line = trim(line);
    }
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
    out += line;
  }
  return out;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
  throw SpecError("line " + std::to_string(line + 1) + ": " + msg);
}

}  // namespace

FunctionSpec parse_fnspec(std::string_view text) {
  auto lines = split_lines(text);
  FunctionSpec spec;
  std::size_t i = 0;
  auto skippable = [&](std::size_t k) {
    auto t = trim(lines[k]);
    return t.empty() || t.front() == '#';
  };
  while (i < lines.size() && skippable(i)) ++i;
  if (i == lines.size()) throw SpecError("empty spec: expected a signature line");
  try {
    auto sig = minifn::parse_signature(trim(lines[i]));
    spec.name = std::move(sig.name);
    spec.params = std::move(sig.params);
    spec.return_type = std::move(sig.return_type);
  } catch (const minifn::ParseError& e) {
    fail_at(i, std::string("bad signature: ") + e.what());
  }
  ++i;

  while (i < lines.size() && skippable(i)) ++i;
  if (i < lines.size() && trim(lines[i]).starts_with("\"\"\"")) {
    std::string_view first = trim(lines[i]);
    first.remove_prefix(3);
    std::vector<std::string_view> body;
    auto close = first.find("\"\"\"");
    if (close != std::string_view::npos) {
      if (!trim(first.substr(close + 3)).empty()) fail_at(i, "text after closing \"\"\"");
      body.push_back(first.substr(0, close));
      ++i;
    } else {
      if (!trim(first).empty()) body.push_back(first);
      std::size_t open = i++;
      bool closed = false;
      for (; i < lines.size(); ++i) {
        auto pos = lines[i].find("\"\"\"");
        if (pos == std::string_view::npos) {
          body.push_back(lines[i]);
          continue;
        }
        if (!trim(lines[i].substr(pos + 3)).empty()) fail_at(i, "text after closing \"\"\"");
        body.push_back(lines[i].substr(0, pos));
        closed = true;
        ++i;
        break;
      }
      if (!closed) fail_at(open, "unterminated purpose block");
    }
    spec.purpose = dedent(body);
  }

  const auto types = spec.param_types();
  const std::string prefix = spec.name + "(";
  for (; i < lines.size(); ++i) {
    if (skippable(i)) continue;
    std::string_view line = trim(lines[i]);
    if (!line.starts_with(">>>")) fail_at(i, "expected '>>> " + spec.name + "(...)'");
    line = trim(line.substr(3));
    if (!line.starts_with(prefix) || !line.ends_with(")")) {
      fail_at(i, "example must call " + spec.name);
    }
    std::string_view inside = line.substr(prefix.size(), line.size() - prefix.size() - 1);
    FunctionalExample ex;
    try {
      ex.args = minifn::parse_values(inside, types);
    } catch (const minifn::ParseError& e) {
      fail_at(i, std::string("bad arguments: ") + e.what());
    }
    std::size_t call_line = i++;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i == lines.size()) fail_at(call_line, "example has no expected result");
    std::string_view expect = trim(lines[i]);
    if (expect != "!error") {
      try {
        ex.expected = minifn::parse_value(expect, spec.return_type);
      } catch (const minifn::ParseError& e) {
        fail_at(i, std::string("bad expected value: ") + e.what());
      }
    }
    spec.examples.push_back(std::move(ex));
  }
  spec.validate();
  return spec;
}

FunctionSpec load_fnspec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_fnspec(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
}

std::string format_fnspec(const FunctionSpec& spec) {
  std::string out = spec.signature() + "\n";
  if (spec.purpose) out += "\"\"\"\n" + *spec.purpose + "\n\"\"\"\n";
  for (const auto& ex : spec.examples) {
    out += ">>> " + spec.call(ex.args) + "\n";
    out += ex.expected ? minifn::to_literal(*ex.expected) : std::string("!error");
    out += "\n";
  }
  return out;
}

std::string build_prompt(const FunctionSpec& spec) {
  std::string out = spec.signature() + " {\n";
  bool has_purpose = spec.purpose && !spec.purpose->empty();
  if (!has_purpose && spec.examples.empty()) return out;
  out += "    \"\"\"";
  if (has_purpose) {
    bool first = true;
    for (auto line : split_lines(*spec.purpose)) {
      if (!first) out += line.empty() ? "\n" : "\n    ";
      out += line;
      first = false;
    }
    out += "\n";
  } else {
    out += "\n";
  }
  for (const auto& ex : spec.examples) {
    out += "\n    >>> " + spec.call(ex.args) + "\n    ";
    out += ex.expected ? minifn::to_literal(*ex.expected) : std::string("!error");
    out += "\n";
  }
  out += "    \"\"\"\n";
  return out;
}

json example_to_json(const FunctionalExample& ex) {
  json args = json::array();
  for (const auto& a : ex.args) args.push_back(minifn::to_json(a));
  json expected;
  if (ex.expected) {
    expected = {{"kind", "value"}, {"value", minifn::to_json(*ex.expected)}};
  } else {
    expected = {{"kind", "error"}};
  }
  return {{"args", std::move(args)}, {"expected", std::move(expected)}};
}

FunctionalExample example_from_json(const json& j, const FunctionSpec& spec) {
  if (!j.is_object() || !j.contains("args") || !j["args"].is_array()) {
    throw minifn::ValueDecodeError("example needs an 'args' array");
  }
  const auto& args = j["args"];
  if (args.size() != spec.params.size()) {
    throw minifn::ValueDecodeError("example has " + std::to_string(args.size()) +
                                   " arguments, expected " +
                                   std::to_string(spec.params.size()));
  }
  FunctionalExample ex;
  for (std::size_t i = 0; i < args.size(); ++i) {
    ex.args.push_back(minifn::value_from_json(args[i], spec.params[i].type));
  }
  if (!j.contains("expected") || !j["expected"].is_object()) {
    throw minifn::ValueDecodeError("example needs an 'expected' object");
  }
  const auto& e = j["expected"];
  std::string kind = e.value("kind", "");
  if (kind == "value") {
    if (!e.contains("value")) throw minifn::ValueDecodeError("expected value missing");
    ex.expected = minifn::value_from_json(e["value"], spec.return_type);
  } else if (kind != "error") {
    throw minifn::ValueDecodeError("expected.kind must be 'value' or 'error'");
  }
  return ex;
}

json spec_to_json(const FunctionSpec& spec) {
  json params = json::array();
  for (const auto& p : spec.params) {
    params.push_back({{"name", p.name}, {"type", p.type.to_string()}});
  }
  json examples = json::array();
  for (const auto& ex : spec.examples) examples.push_back(example_to_json(ex));
  json j = {{"name", spec.name},
            {"signature", spec.signature()},
            {"params", std::move(params)},
            {"return_type", spec.return_type.to_string()},
            {"purpose", spec.purpose ? json(*spec.purpose) : json(nullptr)},
            {"examples", std::move(examples)},
            {"variant", spec.variant ? json(std::string(to_string(*spec.variant)))
                                     : json(nullptr)}};
  return j;
}

FunctionSpec spec_from_json(const json& j) {
  if (j.is_string()) return parse_fnspec(j.get<std::string>());
  if (!j.is_object()) throw SpecError("spec must be an object or .fnspec text");
  if (j.contains("fnspec")) return parse_fnspec(j["fnspec"].get<std::string>());
  FunctionSpec spec;
  try {
    auto sig = minifn::parse_signature(j.at("signature").get<std::string>());
    spec.name = sig.name;
    spec.params = sig.params;
    spec.return_type = sig.return_type;
  } catch (const minifn::ParseError& e) {
    throw SpecError(std::string("bad signature: ") + e.what());
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  if (j.contains("purpose") && j["purpose"].is_string()) {
    spec.purpose = j["purpose"].get<std::string>();
  }
  if (j.contains("examples")) {
    for (const auto& ex : j["examples"]) spec.examples.push_back(example_from_json(ex, spec));
  }
  if (j.contains("variant") && j["variant"].is_string()) {
    spec.variant = parse_variant(j["variant"].get<std::string>());
    if (!spec.variant) throw SpecError("unknown variant " + j["variant"].dump());
  }
  spec.validate();
  return spec;
}

}  // namespace disambig::acquisition
