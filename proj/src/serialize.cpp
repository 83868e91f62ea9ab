#include "avp/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "avp/error.hpp"

namespace avp {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_json(const json& j) { return fnv1a(j.dump()); }

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return mix_seed(mix_seed(mix_seed(a, b), c), d);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  require(j.is_object(), Errc::invalid_argument, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return it.key() == k; }) != known.end(),
            Errc::invalid_argument, "unknown key '" + it.key() + "' in " + where);
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  require(j.is_array() && j.size() == 3, Errc::io, "expected 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json quat_to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

Quat quat_from_json(const json& j) {
  require(j.is_array() && j.size() == 4, Errc::io, "expected quaternion [w,x,y,z]");
  return Quat(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::io, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), Errc::io, "write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_artifact(const std::filesystem::path& path, std::string_view format, int version,
                    json body) {
  body["format"] = std::string(format);
  body["version"] = version;
  write_text(path, body.dump());
}

json read_artifact(const std::filesystem::path& path, std::string_view format, int version) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(Errc::io, path.string() + ": " + e.what());
  }
  require(j.value("format", std::string()) == format, Errc::io,
          path.string() + ": not a " + std::string(format) + " file");
  require(j.value("version", -1) == version, Errc::io,
          path.string() + ": unsupported version " + std::to_string(j.value("version", -1)));
  return j;
}

}  // namespace avp
