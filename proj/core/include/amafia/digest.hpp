// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace amafia {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Hex string of `bytes` bytes from the OpenSSL CSPRNG.
std::string random_token(std::size_t bytes = 16);

}  // namespace amafia
