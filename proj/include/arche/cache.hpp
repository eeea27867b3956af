#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>

#include <json.hpp>

#include "arche/sha256.hpp"

namespace arche {

using WarningSink = std::function<void(const std::string&)>;

/// Write-once disk cache for raw backend responses.
///
/// One file per key under the cache directory; the filename is the hex
/// SHA-256 of (backend id, prompt). Values are stored inside a JSON envelope
/// together with the request metadata. Writes go through a temp file plus
/// atomic rename, so concurrent writers of the same key are safe. Any cache
/// I/O failure degrades to cacheless operation with a warning.
class ResponseCache {
public:
  ResponseCache() = default;  // disabled

  explicit ResponseCache(std::filesystem::path dir, WarningSink warn = {})
      : dir_(std::move(dir)), warn_(std::move(warn)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
      emit_warning("cache disabled: cannot create directory " + dir_.string() + ": " +
                   ec.message());
      return;
    }
    enabled_ = true;
  }

  bool enabled() const { return enabled_; }
  const std::filesystem::path& directory() const { return dir_; }

  static std::string key_for(std::string_view backend_id, std::string_view prompt) {
    std::string material;
    material.reserve(backend_id.size() + prompt.size() + 1);
    material.append(backend_id);
    material.push_back('\0');
    material.append(prompt);
    return detail::sha256_hex(material);
  }

  std::optional<std::string> get(std::string_view backend_id, std::string_view prompt) const {
    if (!enabled_) return std::nullopt;
    std::filesystem::path path = entry_path(backend_id, prompt);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json envelope = nlohmann::json::parse(buf.str(), nullptr, false);
    if (envelope.is_discarded() || !envelope.is_object() || !envelope.contains("response") ||
        !envelope["response"].is_string()) {
      emit_warning("cache entry " + path.string() + " is corrupt; treated as a miss");
      return std::nullopt;
    }
    // Paranoia against hash collisions: the envelope stores the prompt.
    if (envelope.value("prompt", std::string()) != prompt ||
        envelope.value("backend_id", std::string()) != backend_id) {
      emit_warning("cache entry " + path.string() + " does not match its key; treated as a miss");
      return std::nullopt;
    }
    return envelope["response"].get<std::string>();
  }

  void put(std::string_view backend_id, std::string_view prompt, std::string_view response,
           std::string_view template_version = "") {
    if (!enabled_) return;
    std::filesystem::path path = entry_path(backend_id, prompt);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) return;  // write-once

    nlohmann::json envelope{{"schema_version", 1},
                            {"backend_id", std::string(backend_id)},
                            {"prompt", std::string(prompt)},
                            {"response", std::string(response)}};
    if (!template_version.empty()) envelope["template_version"] = std::string(template_version);

    std::filesystem::path tmp = path;
    tmp += ".tmp." + unique_suffix();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        emit_warning("cache write failed for " + path.string() + "; continuing without cache");
        return;
      }
      out << envelope.dump(2) << "\n";
      if (!out) {
        emit_warning("cache write failed for " + path.string() + "; continuing without cache");
        std::filesystem::remove(tmp, ec);
        return;
      }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      emit_warning("cache rename failed for " + path.string() + ": " + ec.message());
      std::filesystem::remove(tmp, ec);
    }
  }

private:
  std::filesystem::path entry_path(std::string_view backend_id, std::string_view prompt) const {
    return dir_ / (key_for(backend_id, prompt) + ".json");
  }

  static std::string unique_suffix() {
    static std::atomic<uint64_t> counter{0};
    std::ostringstream out;
    out << std::this_thread::get_id() << "." << counter.fetch_add(1) << "."
        << std::random_device{}();
    return out.str();
  }

  void emit_warning(const std::string& message) const {
    if (warn_) warn_(message);
  }

  std::filesystem::path dir_;
  WarningSink warn_;
  bool enabled_ = false;
};

}  // namespace arche
