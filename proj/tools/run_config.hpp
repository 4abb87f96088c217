#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace counterca::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

// Flat `key = value` settings checked against a fixed schema.  Every key of the
// schema has a value (the default unless overridden).
class RunConfig {
 public:
  explicit RunConfig(std::vector<KeySpec> schema);

  // Lines `key = value`; `#` starts a comment.  Unknown keys are rejected.
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& source = "<text>");
  void set(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::vector<KeySpec>& schema() const { return schema_; }
  // Sorted `key=value` lines.
  std::string canonical() const;
  std::string digest() const;

 private:
  std::vector<KeySpec> schema_;
  std::map<std::string, std::string> values_;
};

}  // namespace counterca::cli
