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

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vsync/esql/ast.hpp"
#include "vsync/wsmkb.hpp"

namespace vsync::wsvkb {

struct ViewRecord {
    std::string view_id;
    esql::ViewDefinition definition;
    std::string original_text; // verbatim, kept for diagnostics
    bool valid = true;         // cleared when a synchronization fails
};

/// Web services View Knowledge Base: view definitions keyed by id plus the
/// web-service -> view map. Same single-writer/snapshot-reader contract as
/// the WSMKB (value semantics; copy = snapshot).
class Store {
  public:
    /// Registers a view. The definition must validate against the WSMKB
    /// schemas. Throws DuplicateId or ValidationError.
    void add_view(const ViewRecord& record, const wsmkb::Store& mkb);

    /// Associates a web service with an ordered view list; all ids must
    /// resolve. Throws UnknownView.
    void set_ws_views(const std::string& ws_id, const std::vector<std::string>& view_ids);

    /// Views whose FROM lists the relation.
    std::set<std::string> views_referencing(const RelationRef& relation) const;
    /// Views mentioning the attribute in SELECT or WHERE through any alias
    /// of its relation.
    std::set<std::string> views_referencing(const AttributeRef& attribute) const;

    /// All web services whose view list contains view_id.
    /// Throws UnknownView if the view is not registered.
    std::set<std::string> web_services_of_view(const std::string& view_id) const;

    const ViewRecord* find_view(const std::string& view_id) const;
    const ViewRecord& view(const std::string& view_id) const; // throws UnknownView

    /// Replaces a stored definition after a successful rewrite.
    void update_definition(const std::string& view_id, const esql::ViewDefinition& definition);
    /// Marks a view invalid after a failed synchronization; the stored
    /// definition is left untouched.
    void mark_invalid(const std::string& view_id);

    const std::map<std::string, ViewRecord>& views() const { return views_; }
    const std::map<std::string, std::vector<std::string>>& ws_views() const { return ws_views_; }
    size_t view_count() const { return views_.size(); }

    /// Re-checks a definition against schemas without storing anything.
    /// Throws ValidationError on a dangling relation/attribute reference.
    static void validate_against(const esql::ViewDefinition& view, const wsmkb::Store& mkb);

  private:
    std::map<std::string, ViewRecord> views_;
    std::map<std::string, std::vector<std::string>> ws_views_;
};

} // namespace vsync::wsvkb
