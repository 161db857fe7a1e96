#ifndef PHOTODYN_IO_DIGEST_HPP
#define PHOTODYN_IO_DIGEST_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace photodyn::io {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace photodyn::io

#endif  // PHOTODYN_IO_DIGEST_HPP
