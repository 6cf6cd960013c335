#include "gapmode/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gapmode/errors.hpp"

namespace gapmode {

Json Json::boolean(bool b) {
  Json j;
  j.type_ = Type::Bool;
  j.b_ = b;
  return j;
}

Json Json::integer(long long i) {
  Json j;
  j.type_ = Type::Int;
  j.i_ = i;
  return j;
}

Json Json::real(double d) {
  Json j;
  j.type_ = Type::Real;
  j.d_ = d;
  return j;
}

Json Json::str(std::string s) {
  Json j;
  j.type_ = Type::Str;
  j.s_ = std::move(s);
  return j;
}

Json Json::array() {
  Json j;
  j.type_ = Type::Arr;
  return j;
}

Json Json::object() {
  Json j;
  j.type_ = Type::Obj;
  return j;
}

Json& Json::push(Json v) {
  arr_.push_back(std::move(v));
  return *this;
}

Json& Json::set(std::string key, Json v) {
  obj_.emplace_back(std::move(key), std::move(v));
  return *this;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
  auto pad = [&](int d) {
    if (indent > 0) out.append(static_cast<size_t>(indent) * d, ' ');
  };
  switch (type_) {
    case Type::Null: out += "null"; break;
    case Type::Bool: out += b_ ? "true" : "false"; break;
    case Type::Int: out += std::to_string(i_); break;
    case Type::Real:
      // JSON has no literal for non-finite reals
      out += std::isfinite(d_) ? format_g17(d_) : "null";
      break;
    case Type::Str: escape_into(out, s_); break;
    case Type::Arr: {
      if (arr_.empty()) {
        out += "[]";
        break;
      }
      out += '[';
      for (size_t i = 0; i < arr_.size(); ++i) {
        if (indent > 0) out += '\n';
        pad(depth + 1);
        arr_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < arr_.size()) out += ',';
      }
      if (indent > 0) out += '\n';
      pad(depth);
      out += ']';
      break;
    }
    case Type::Obj: {
      if (obj_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (size_t i = 0; i < obj_.size(); ++i) {
        if (indent > 0) out += '\n';
        pad(depth + 1);
        escape_into(out, obj_[i].first);
        out += indent > 0 ? ": " : ":";
        obj_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < obj_.size()) out += ',';
      }
      if (indent > 0) out += '\n';
      pad(depth);
      out += '}';
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw ConfigError("failed writing output file: " + path);
}

}  // namespace gapmode
