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

#include "vsync/sync.hpp"

namespace vsync::report {

/// Deterministic human-readable rendering (views ordered by id).
/// Rewritten views include their canonical E-SQL text.
std::string render_text(const sync::SyncReport& report);

/// Deterministic JSON rendering of the same content.
std::string render_json(const sync::SyncReport& report);

/// True iff any view outcome is Failed (drives the CLI exit code).
bool any_failure(const sync::SyncReport& report);

} // namespace vsync::report
