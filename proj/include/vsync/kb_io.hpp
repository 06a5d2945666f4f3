/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <string>
#include <vector>

#include "vsync/wsmkb.hpp"
#include "vsync/wsvkb.hpp"

namespace vsync::kb_io {

struct LoadResult {
    wsmkb::Store mkb;
    wsvkb::Store vkb;
    // Declared web-service source sets that differ from the sources their
    // views actually reference. Advisory only, never a rejection.
    std::vector<std::string> warnings;
};

/// Loads a knowledge-base JSON document (see docs/kb_schema.md) into valid
/// stores or throws on the first violation, with its location in the
/// message. Throws Error with code IoError (unreadable file / bad JSON)
/// or the violation's own code.
LoadResult load_file(const std::string& path);

/// Same, from an in-memory document; `origin` names it in diagnostics.
LoadResult load_text(const std::string& text, const std::string& origin);

} // namespace vsync::kb_io
