#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace ict {

/// Flat key-value configuration with optional [section] headers. A key inside
/// [train] is stored as "train.key". Later assignments override earlier ones,
/// which gives the defaults <- file <- command-line precedence when sources
/// are concatenated in that order.
class Config {
  public:
    static Config parse_text(const std::string& text);
    static Config parse_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void merge(const Config& overrides);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Sorted `key = value` lines; the canonical resolved form.
    std::string serialize() const;

    /// FNV-1a of the serialized form, as hex.
    std::string fingerprint() const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

} // namespace ict
