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
#include "vsync/kb_io.hpp"

using namespace vsync;

namespace {

struct Failure {
    ErrorCode code;
    std::string message;
};

Failure load_failure(const std::string& text) {
    try {
        kb_io::load_text(text, "inline");
    } catch (const Error& e) {
        return {e.code(), e.what()};
    }
    return {ErrorCode::IoError, "no failure"};
}

} // namespace

TEST_CASE("the healthcare fixture loads with the documented population") {
    auto loaded = testutil::load_healthcare();
    CHECK(loaded.mkb.source_count() == 3);
    CHECK(loaded.mkb.tc_count() == 20);
    CHECK(loaded.mkb.jc_count() == 11);
    CHECK(loaded.mkb.pc_count() == 5);
    CHECK(loaded.mkb.web_service_count() == 3);
    CHECK(loaded.vkb.view_count() == 6);
    CHECK(loaded.warnings.empty());
}

TEST_CASE("missing files and malformed JSON are I/O errors") {
    try {
        kb_io::load_file("/nonexistent/kb.json");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
        CHECK(std::string(e.what()).find("no such file") != std::string::npos);
    }
    CHECK(load_failure("{ not json").code == ErrorCode::IoError);
}

TEST_CASE("violations are reported with their location") {
    auto f = load_failure(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [
            {"name": "A", "type": "Number"}, {"name": "B", "type": "String"}]}
        ]}
      ],
      "join_constraints": [
        {"left": "S1.R", "right": "S1.R", "equalities": [["A", "B"]]}
      ]
    })");
    CHECK(f.code == ErrorCode::InvariantViolation);
    CHECK(f.message.find("join_constraints[0]") != std::string::npos);

    f = load_failure(R"({"sources": [{"id": "S1"}]})");
    CHECK(f.code == ErrorCode::ValidationError);
    CHECK(f.message.find("sources[0]") != std::string::npos);

    f = load_failure(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [{"name": "A", "type": "Integer"}]}
        ]}
      ]
    })");
    CHECK(f.code == ErrorCode::ValidationError);
    CHECK(f.message.find("unknown type") != std::string::npos);
}

TEST_CASE("views are parsed, validated, and rejected with their id on failure") {
    auto f = load_failure(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [{"name": "A", "type": "Number"}]}
        ]}
      ],
      "views": [
        {"id": "V1", "esql": "CREATE VIEW V1 AS SELECT T.Missing FROM S1.R T;"}
      ]
    })");
    CHECK(f.code == ErrorCode::ValidationError);
    CHECK(f.message.find("V1") != std::string::npos);

    f = load_failure(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [{"name": "A", "type": "Number"}]}
        ]}
      ],
      "views": [
        {"id": "V1", "esql": "CREATE VIEW V1 AS SELECT T.A FROM S1.R T;"},
        {"id": "V1", "esql": "CREATE VIEW V1 AS SELECT T.A FROM S1.R T;"}
      ]
    })");
    CHECK(f.code == ErrorCode::DuplicateId);
}

TEST_CASE("web services validate against both stores") {
    const char* base = R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [{"name": "A", "type": "Number"}]}
        ]}
      ],
      "views": [
        {"id": "V1", "esql": "CREATE VIEW V1 AS SELECT T.A FROM S1.R T;"}
      ],
      "web_services": [%s]
    })";
    auto with_ws = [&](const char* ws) {
        std::string text = base;
        text.replace(text.find("%s"), 2, ws);
        return load_failure(text);
    };
    CHECK(with_ws(R"({"id": "W1", "sources": ["S9"], "views": ["V1"]})").code ==
          ErrorCode::DanglingReference);
    CHECK(with_ws(R"({"id": "W1", "sources": ["S1"], "views": ["V9"]})").code ==
          ErrorCode::UnknownView);
    CHECK(with_ws(R"({"id": "W1", "sources": ["S1"], "views": ["V1"],
                      "replacements": ["W9"]})").code == ErrorCode::DanglingReference);
    CHECK(with_ws(R"({"id": "W1", "sources": ["S1"], "views": []})").code ==
          ErrorCode::InvariantViolation);
}

TEST_CASE("selection-bearing pc constraints load intact") {
    auto loaded = kb_io::load_text(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [
            {"name": "A", "type": "Number"}, {"name": "B", "type": "String"}]},
          {"name": "Q", "attributes": [
            {"name": "A", "type": "Number"}, {"name": "B", "type": "String"}]}
        ]}
      ],
      "pc_constraints": [
        {"left": {"relation": "S1.R", "projection": ["A"],
                  "selection": [{"attribute": "B", "op": "=", "value": {"string": "x"}}]},
         "theta": "subset",
         "right": {"relation": "S1.Q", "projection": ["A"]}}
      ]
    })",
                                    "inline");
    REQUIRE(loaded.mkb.pc_count() == 1);
    CHECK(loaded.mkb.pc_constraints()[0].left.selection.size() == 1);
    CHECK_FALSE(loaded.mkb.pc_constraints()[0].projection_only());
    CHECK(loaded.mkb.candidate_substitute_relations({"S1", "R"}).empty());
}

TEST_CASE("declared and referenced web-service sources are reconciled with a warning") {
    auto loaded = kb_io::load_text(R"({
      "sources": [
        {"id": "S1", "relations": [
          {"name": "R", "attributes": [{"name": "A", "type": "Number"}]}
        ]},
        {"id": "S2", "relations": [
          {"name": "Q", "attributes": [{"name": "B", "type": "Number"}]}
        ]}
      ],
      "views": [
        {"id": "V1", "esql": "CREATE VIEW V1 AS SELECT T.A FROM S1.R T;"},
        {"id": "V2", "esql": "CREATE VIEW V2 AS SELECT U.B FROM S2.Q U;"}
      ],
      "web_services": [
        {"id": "W1", "sources": ["S1"], "views": ["V1", "V2"]}
      ]
    })",
                                   "inline");
    REQUIRE(loaded.warnings.size() == 1);
    CHECK(loaded.warnings[0].find("W1") != std::string::npos);
    CHECK(loaded.warnings[0].find("S2") != std::string::npos);
}
