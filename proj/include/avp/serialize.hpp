#pragma once

#include <cstdint>
#include <initializer_list>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "avp/geometry.hpp"

namespace avp {

using json = nlohmann::json;

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t hash_json(const json& j);
std::string hex(std::uint64_t value);

/// splitmix64 mixing; used to derive independent per-cell seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

/// Throws invalid_argument if `j` is not an object or has a key outside `known`.
void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where);

json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);
json quat_to_json(const Quat& q);
Quat quat_from_json(const json& j);

// Artifact files are JSON documents with a {"format", "version"} envelope.
void write_artifact(const std::filesystem::path& path, std::string_view format, int version,
                    json body);
json read_artifact(const std::filesystem::path& path, std::string_view format, int version);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace avp
