#ifndef GAPMODE_REPORT_HPP
#define GAPMODE_REPORT_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gapmode {

/// Minimal ordered JSON value for report emission. Keys keep insertion order
/// and all reals are serialized with 17 significant digits so repeated runs
/// are byte-identical and round-trip losslessly.
class Json {
 public:
  Json() : type_(Type::Null) {}
  static Json boolean(bool b);
  static Json integer(long long i);
  static Json real(double d);
  static Json str(std::string s);
  static Json array();
  static Json object();

  Json& push(Json v);                       // array
  Json& set(std::string key, Json v);       // object
  Json& set(std::string key, double d) { return set(std::move(key), real(d)); }
  Json& set(std::string key, long long i) { return set(std::move(key), integer(i)); }
  Json& set(std::string key, int i) { return set(std::move(key), integer(i)); }
  Json& set(std::string key, bool b) { return set(std::move(key), boolean(b)); }
  Json& set(std::string key, const char* s) { return set(std::move(key), str(s)); }
  Json& set(std::string key, const std::string& s) { return set(std::move(key), str(s)); }

  std::string dump(int indent = 2) const;

 private:
  enum class Type { Null, Bool, Int, Real, Str, Arr, Obj };
  void dump_to(std::string& out, int indent, int depth) const;

  Type type_;
  bool b_ = false;
  long long i_ = 0;
  double d_ = 0.0;
  std::string s_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
};

/// printf %.17g with deterministic spelling for non-finite values.
std::string format_g17(double v);

/// FNV-1a 64-bit over raw bytes, hex-encoded; used as the config hash.
std::string fnv1a_hex(std::string_view bytes);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace gapmode

#endif
