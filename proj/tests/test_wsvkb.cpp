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
#include <doctest.h>

#include "testutil.hpp"
#include "vsync/esql/parser.hpp"
#include "vsync/esql/printer.hpp"
#include "vsync/wsvkb.hpp"

using namespace vsync;

namespace {

wsvkb::ViewRecord make_record(const std::string& id, const std::string& text) {
    wsvkb::ViewRecord record;
    record.view_id = id;
    record.original_text = text;
    record.definition = esql::parse_view(text);
    return record;
}

} // namespace

TEST_CASE("adding a view makes it discoverable by the relations it lists") {
    auto loaded = testutil::load_healthcare();
    wsvkb::Store vkb;
    vkb.add_view(make_record("V1", testutil::read_file(testutil::fixture_path(
                                       "golden_v1_rewrite.esql"))),
                 loaded.mkb);
    auto views = vkb.views_referencing(RelationRef{"S1", "Doctor"});
    CHECK(views.count("V1") == 1);
}

TEST_CASE("duplicate ids and dangling references are rejected") {
    auto loaded = testutil::load_healthcare();
    wsvkb::Store vkb;
    auto record = make_record("V1", "CREATE VIEW V1 AS SELECT D.IdD FROM S1.Doctor D;");
    vkb.add_view(record, loaded.mkb);
    try {
        vkb.add_view(record, loaded.mkb);
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateId);
    }
    try {
        vkb.add_view(make_record("V9", "CREATE VIEW V9 AS SELECT D.Salary FROM S1.Doctor D;"),
                     loaded.mkb);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
    }
    try {
        vkb.add_view(make_record("V8", "CREATE VIEW V8 AS SELECT T.X FROM S1.Nowhere T;"),
                     loaded.mkb);
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
    }
}

TEST_CASE("views_referencing distinguishes attributes from relations") {
    auto loaded = testutil::load_healthcare();
    const wsvkb::Store& vkb = loaded.vkb;
    CHECK(vkb.views_referencing(AttributeRef{"S1", "Doctor", "Name"}) ==
          std::set<std::string>{"V1"});
    CHECK(vkb.views_referencing(RelationRef{"S1", "Hospital"}) == std::set<std::string>{"V2"});
    CHECK(vkb.views_referencing(AttributeRef{"S3", "Service", "IdS"}).empty());
    // V5 is over S2.Doctor, so S1.Doctor.IdD reaches only V1
    CHECK(vkb.views_referencing(AttributeRef{"S1", "Doctor", "IdD"}) ==
          std::set<std::string>{"V1"});
}

TEST_CASE("attribute references imply relation references") {
    auto loaded = testutil::load_healthcare();
    const wsvkb::Store& vkb = loaded.vkb;
    for (const auto& [sid, source] : loaded.mkb.schemas()) {
        for (const auto& rel : source.relations) {
            auto by_relation = vkb.views_referencing(RelationRef{sid, rel.name});
            for (const auto& [attr, type] : rel.attributes) {
                for (const auto& id : vkb.views_referencing(AttributeRef{sid, rel.name, attr}))
                    CHECK(by_relation.count(id) == 1);
            }
        }
    }
}

TEST_CASE("web_services_of_view inverts the ws map") {
    auto loaded = testutil::load_healthcare();
    CHECK(loaded.vkb.web_services_of_view("V3") == std::set<std::string>{"WS1", "WS2"});
    CHECK(loaded.vkb.web_services_of_view("V6") == std::set<std::string>{"WS3"});
    try {
        loaded.vkb.web_services_of_view("V99");
        FAIL("expected UnknownView");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownView);
    }
}

TEST_CASE("ws view lists must resolve") {
    auto loaded = testutil::load_healthcare();
    try {
        loaded.vkb.set_ws_views("WS9", {"V99"});
        FAIL("expected UnknownView");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownView);
    }
}

TEST_CASE("stored definitions survive a print/parse round trip") {
    auto loaded = testutil::load_healthcare();
    for (const auto& [id, record] : loaded.vkb.views()) {
        CHECK(esql::parse_view(esql::print_view(record.definition)) == record.definition);
    }
}

TEST_CASE("updates replace definitions; failures mark records invalid but keep them") {
    auto loaded = testutil::load_healthcare();
    wsvkb::Store& vkb = loaded.vkb;
    auto rewritten =
        esql::parse_view(testutil::read_file(testutil::fixture_path("golden_v1_rewrite.esql")));
    vkb.update_definition("V1", rewritten);
    CHECK(vkb.view("V1").definition == rewritten);
    CHECK(vkb.view("V1").valid);
    CHECK(vkb.view("V1").original_text.find("CREATE VIEW V1") == 0);

    vkb.mark_invalid("V2");
    CHECK_FALSE(vkb.view("V2").valid);
    CHECK(vkb.view("V2").definition.name == "V2");
}
