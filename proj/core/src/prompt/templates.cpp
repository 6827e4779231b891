// SPDX-License-Identifier: Apache-2.0
#include "amafia/prompt/templates.hpp"

#include "amafia/error.hpp"

namespace amafia::templates {

std::string_view get(std::string_view name) {
  const auto& table = all();
  auto it = table.find(name);
  if (it == table.end())
    throw Error(Errc::UnknownPlaceholder, "no prompt asset named '" + std::string(name) + "'");
  return it->second;
}

std::string render(std::string_view tpl, const Bindings& bindings) {
  std::string out;
  out.reserve(tpl.size() * 2);
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t open = tpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    std::size_t close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos)
      throw Error(Errc::UnknownPlaceholder, "unterminated placeholder in template");
    out.append(tpl.substr(pos, open - pos));
    std::string_view key = tpl.substr(open + 2, close - open - 2);
    bool bound = false;
    for (const auto& [k, v] : bindings) {
      if (k == key) {
        out.append(v);
        bound = true;
        break;
      }
    }
    if (!bound) throw Error(Errc::UnknownPlaceholder, "unbound placeholder {{" + std::string(key) + "}}");
    pos = close + 2;
  }
  return out;
}

}  // namespace amafia::templates
