#include <gtest/gtest.h>

#include "support.hpp"
#include "tada/server/export.hpp"
#include "tada/store/replay.hpp"

using namespace tada;
using namespace tada::server;
using test::body_of;
using test::kParticipantToken;
using test::kResearcherToken;
using test::make_request;

namespace {

const Json kTwoFoods = Json::array({Json{{"label", "pasta"}, {"x_px", 30}, {"y_px", 40}, {"confidence", 0.9}},
                                    Json{{"label", "bread"}, {"x_px", 70}, {"y_px", 20}, {"confidence", 0.8}}});

struct Api : ::testing::Test {
    test::TempDir dir;
    ServerConfig config;
    std::unique_ptr<Service> service;
    std::unique_ptr<Router> router;
    int salt = 0;

    explicit Api(AnalysisMode mode = AnalysisMode::Sync, std::uint64_t max_bytes = 1 << 20)
        : config(test::test_config(dir.path(), mode)) {
        config.max_image_bytes = max_bytes;
        service = Service::from_config(config);
        router = std::make_unique<Router>(*service);
    }

    Response call(const std::string& method, const std::string& path, const std::string& token,
                  const Json& body = nullptr, std::map<std::string, std::string> query = {}) {
        return router->handle(make_request(method, path, token, body.is_null() ? "" : body.dump(), std::move(query)));
    }
    Response researcher(const std::string& method, const std::string& path, const Json& body = nullptr,
                        std::map<std::string, std::string> query = {}) {
        return call(method, path, kResearcherToken, body, std::move(query));
    }

    test::UploadParts parts(const std::string& name) {
        test::UploadParts p;
        p.before = test::make_png(100, 80, ++salt);
        p.after = test::make_png(100, 80, ++salt);
        p.before_name = name;
        return p;
    }

    std::string upload(const std::string& name, const Json& sidecar = kTwoFoods, test::UploadParts* custom = nullptr) {
        if (!sidecar.is_null()) test::write_sidecar(config.sidecar_dir, name, sidecar);
        auto p = custom ? *custom : parts(name);
        const auto r = router->handle(test::upload_request(p));
        EXPECT_EQ(r.status, 201) << r.body;
        return body_of(r)["occasion_id"];
    }

    Json review_all_confirmed(const std::string& id) {
        const auto r = call("POST", "/api/v1/occasions/" + id + "/review", kParticipantToken,
                            Json{{"verdicts", {{{"prediction_id", "p1"}, {"verdict", "Confirmed"}},
                                               {{"prediction_id", "p2"}, {"verdict", "Confirmed"}}}}});
        EXPECT_EQ(r.status, 200) << r.body;
        return body_of(r);
    }

    static std::string code_of(const Response& r) { return body_of(r)["error"]["code"]; }
};

Json annotation(int x, int y, int w, int h, const std::string& label) {
    return Json{{"box", {{"x_px", x}, {"y_px", y}, {"w_px", w}, {"h_px", h}}}, {"label", label}};
}

} // namespace

TEST_F(Api, Authentication) {
    EXPECT_EQ(code_of(call("GET", "/api/v1/foods", "")), "UNAUTHORIZED");
    EXPECT_EQ(code_of(call("GET", "/api/v1/foods", "wrong")), "UNAUTHORIZED");
    EXPECT_EQ(call("GET", "/api/v1/foods", kParticipantToken).status, 200);
    EXPECT_EQ(code_of(call("GET", "/api/v1/studies/demo/export", kParticipantToken)), "FORBIDDEN");
    EXPECT_EQ(call("GET", "/api/v1/studies/demo/export", kResearcherToken).status, 200);
    EXPECT_EQ(code_of(researcher("GET", "/api/v1/nowhere")), "NOT_FOUND");
    EXPECT_EQ(call("GET", "/api/v1/health", "").status, 200);
}

TEST_F(Api, UploadAnalyzesSynchronously) {
    const auto id = upload("meal.png");
    const auto r = call("GET", "/api/v1/occasions/" + id + "/predictions", kParticipantToken);
    ASSERT_EQ(r.status, 200);
    const auto b = body_of(r);
    EXPECT_EQ(b["state"], "Analyzed");
    EXPECT_EQ(b["status"], "ready");
    EXPECT_EQ(b["version"], 2);
    ASSERT_EQ(b["predictions"].size(), 2u);
    EXPECT_EQ(b["predictions"][0]["label"], "pasta");
    EXPECT_EQ(b["predictions"][0]["pin"], (Json{{"x_px", 30}, {"y_px", 40}}));
}

TEST_F(Api, UploadValidation) {
    auto p = parts("meal.png");
    p.after.reset();
    auto r = router->handle(test::upload_request(p));
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(body_of(r)["error"]["details"]["violations"][0]["field"], "after");

    p = parts("meal.png");
    p.metadata["gps"] = {{"latitude", 123}, {"longitude", 0}};
    r = router->handle(test::upload_request(p));
    EXPECT_EQ(code_of(r), "VALIDATION_FAILED");
    EXPECT_EQ(body_of(r)["error"]["details"]["violations"][0]["field"], "gps.latitude");

    p = parts("meal.png");
    p.before = "not an image";
    EXPECT_EQ(router->handle(test::upload_request(p)).status, 422);

    p = parts("meal.png");
    p.study_id = "nope";
    EXPECT_EQ(router->handle(test::upload_request(p)).status, 422);
    EXPECT_EQ(service->store().count_occasions(), 0);
}

TEST_F(Api, PayloadTooLarge) {
    auto p = parts("big.png");
    p.before = test::make_png(1200, 1000, 1);
    const auto r = router->handle(test::upload_request(p));
    EXPECT_EQ(r.status, 413);
    EXPECT_EQ(code_of(r), "PAYLOAD_TOO_LARGE");
}

TEST_F(Api, IdempotencyKeyReturnsSameOccasion) {
    test::write_sidecar(config.sidecar_dir, "meal.png", kTwoFoods);
    auto p = parts("meal.png");
    p.idempotency_key = "k-123";
    const auto first = router->handle(test::upload_request(p));
    const auto second = router->handle(test::upload_request(p));
    EXPECT_EQ(first.status, 201);
    EXPECT_EQ(second.status, 200);
    EXPECT_EQ(body_of(first)["occasion_id"], body_of(second)["occasion_id"]);
    EXPECT_EQ(service->store().count_occasions(), 1);
}

TEST_F(Api, MissingSidecarReportedThenRetried) {
    auto p = parts("unseen.png");
    const auto r = router->handle(test::upload_request(p));
    ASSERT_EQ(r.status, 201);
    EXPECT_EQ(body_of(r)["analysis"], "failed");
    const std::string id = body_of(r)["occasion_id"];
    const auto pre = body_of(call("GET", "/api/v1/occasions/" + id + "/predictions", kParticipantToken));
    EXPECT_EQ(pre["status"], "failed");
    EXPECT_EQ(pre["error"]["code"], "SIDECAR_MISSING");
    EXPECT_EQ(code_of(researcher("POST", "/api/v1/occasions/" + id + "/process")), "SIDECAR_MISSING");

    test::write_sidecar(config.sidecar_dir, "unseen.png", kTwoFoods);
    const auto again = researcher("POST", "/api/v1/occasions/" + id + "/process");
    EXPECT_EQ(again.status, 200) << again.body;
    EXPECT_EQ(body_of(again)["state"], "Analyzed");
}

TEST_F(Api, ReviewRules) {
    const auto id = upload("meal.png");
    const auto path = "/api/v1/occasions/" + id + "/review";
    auto r = call("POST", path, kParticipantToken, Json{{"verdicts", {{{"prediction_id", "p1"}, {"verdict", "Confirmed"}}}}});
    EXPECT_EQ(code_of(r), "VALIDATION_FAILED");
    r = call("POST", path, kParticipantToken,
             Json{{"verdicts",
                   {{{"prediction_id", "p1"}, {"verdict", "Confirmed"}}, {{"prediction_id", "p9"}, {"verdict", "Removed"}}}}});
    EXPECT_EQ(code_of(r), "VALIDATION_FAILED");
    r = call("POST", path, kParticipantToken,
             Json{{"verdicts",
                   {{{"prediction_id", "p1"}, {"verdict", "Confirmed"}}, {{"prediction_id", "p2"}, {"verdict", "Removed"}}}},
                  {"additions", {{{"label", "water"}, {"pin", {{"x_px", 500}, {"y_px", 1}}}}}}});
    EXPECT_EQ(code_of(r), "VALIDATION_FAILED");

    r = call("POST", path, kParticipantToken,
             Json{{"verdicts",
                   {{{"prediction_id", "p1"}, {"verdict", "Relabeled"}, {"new_label", "lasagna"}},
                    {{"prediction_id", "p2"}, {"verdict", "Removed"}}}},
                  {"additions", {{{"label", "water"}, {"pin", {{"x_px", 5}, {"y_px", 6}}}}}}});
    ASSERT_EQ(r.status, 200) << r.body;
    const auto b = body_of(r);
    EXPECT_EQ(b["state"], "Refined");
    EXPECT_EQ(b["version"], 4);
    ASSERT_EQ(b["confirmed"].size(), 2u);
    EXPECT_EQ(b["confirmed"][0]["label"], "lasagna");
    EXPECT_EQ(b["confirmed"][0]["pin"], (Json{{"x_px", 30}, {"y_px", 40}}));
    EXPECT_EQ(b["confirmed"][1]["label"], "water");
    EXPECT_EQ(b["drafts"].size(), 2u);
    EXPECT_EQ(code_of(call("POST", path, kParticipantToken, Json{{"verdicts", Json::array()}})), "ILLEGAL_TRANSITION");
}

TEST_F(Api, DetailKeepsProvenanceSeparate) {
    const auto id = upload("meal.png");
    review_all_confirmed(id);
    const auto d = body_of(researcher("GET", "/api/v1/occasions/" + id));
    EXPECT_EQ(d["participant_confirmed"]["foods"].size(), 2u);
    EXPECT_EQ(d["researcher_annotations"].size(), 2u);
    EXPECT_EQ(d["researcher_annotations"][0]["initials"], "SYS");
    EXPECT_EQ(d["researcher_annotations"][0]["food_code"], "58132110");
    EXPECT_EQ(d["history"].size(), 4u);
    EXPECT_EQ(d["images"]["before"]["width_px"], 100);
    EXPECT_FALSE(d["finalized"].get<bool>());
    EXPECT_EQ(code_of(call("GET", "/api/v1/occasions/" + id, kParticipantToken)), "FORBIDDEN");
    EXPECT_EQ(code_of(researcher("GET", "/api/v1/occasions/missing")), "NOT_FOUND");
}

TEST_F(Api, AnnotationEditing) {
    const auto id = upload("meal.png");
    const auto base = "/api/v1/occasions/" + id;
    EXPECT_EQ(code_of(researcher("PUT", base + "/annotations",
                                 Json{{"expected_version", 2}, {"initials", "AB"}, {"annotations", Json::array()}})),
              "ILLEGAL_TRANSITION");
    review_all_confirmed(id);

    auto put = [&](std::int64_t version, Json list, const std::string& initials = "AB") {
        return researcher("PUT", base + "/annotations",
                          Json{{"expected_version", version}, {"initials", initials}, {"annotations", std::move(list)}});
    };
    EXPECT_EQ(code_of(put(3, Json::array({annotation(0, 0, 10, 10, "potato")}))), "VERSION_CONFLICT");
    EXPECT_EQ(code_of(put(4, Json::array({annotation(95, 0, 10, 10, "potato")}))), "VALIDATION_FAILED");
    EXPECT_EQ(code_of(put(4, Json::array({annotation(0, 0, 10, 10, "juice")}))), "VALIDATION_FAILED");
    auto coded = annotation(0, 0, 10, 10, "potato");
    coded["food_code"] = "99999999";
    EXPECT_EQ(code_of(put(4, Json::array({coded}))), "VALIDATION_FAILED");
    auto unknown = annotation(0, 0, 10, 10, "potato");
    unknown["annotation_id"] = "a77";
    EXPECT_EQ(code_of(put(4, Json::array({unknown}))), "VALIDATION_FAILED");
    EXPECT_EQ(code_of(put(4, Json::array({annotation(0, 0, 10, 10, "potato")}), "ab")), "VALIDATION_FAILED");

    const auto detail = body_of(researcher("GET", base));
    auto kept = detail["researcher_annotations"][0];
    auto juice = annotation(10, 10, 20, 20, "juice");
    juice["food_code"] = "64100200";
    juice["energy_kcal"] = 80;
    auto r = put(4, Json::array({kept, juice, annotation(0, 0, 10, 10, "dragonfruit smoothie")}));
    ASSERT_EQ(r.status, 200) << r.body;
    const auto saved = body_of(r);
    EXPECT_EQ(saved["version"], 5);
    const auto& list = saved["researcher_annotations"];
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0]["initials"], "SYS"); // unchanged draft keeps its author
    EXPECT_EQ(list[1]["annotation_id"], "a3");
    EXPECT_EQ(list[1]["initials"], "AB");
    EXPECT_EQ(list[1]["energy_source"], "manual");
    EXPECT_EQ(list[2]["free_text"], true);

    EXPECT_EQ(code_of(researcher("DELETE", base + "/annotations/a9", nullptr, {{"expected_version", "5"}, {"initials", "AB"}})),
              "NOT_FOUND");
    EXPECT_EQ(code_of(researcher("DELETE", base + "/annotations/a3", nullptr, {{"expected_version", "5"}})),
              "VALIDATION_FAILED");
    EXPECT_EQ(code_of(researcher("DELETE", base + "/annotations/a3", nullptr, {{"expected_version", "4"}, {"initials", "AB"}})),
              "VERSION_CONFLICT");
    r = researcher("DELETE", base + "/annotations/a3", nullptr, {{"expected_version", "5"}, {"initials", "AB"}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(body_of(r)["researcher_annotations"].size(), 2u);

    const auto trail = service->store().audit_trail(id);
    EXPECT_EQ(trail.size(), 6u);
    EXPECT_EQ(canonical(Json(store::replay(trail))), canonical(Json(*service->store().load_occasion(id))));
}

TEST_F(Api, FinalizeAndExport) {
    auto empty = researcher("GET", "/api/v1/studies/demo/export", nullptr, {{"format", "json"}});
    ASSERT_EQ(empty.status, 200);
    EXPECT_EQ(body_of(empty)["occasions"].size(), 0u);
    EXPECT_EQ(body_of(empty)["manifest"]["occasion_count"], 0);

    const auto id = upload("meal.png");
    review_all_confirmed(id);
    const auto base = "/api/v1/occasions/" + id;
    auto r = researcher("PUT", base + "/annotations",
                        Json{{"expected_version", 4}, {"initials", "AB"}, {"annotations", Json::array()}});
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(code_of(researcher("POST", base + "/finalize", Json{{"expected_version", 5}, {"initials", "AB"}})),
              "VALIDATION_FAILED");

    auto potato = annotation(10, 10, 40, 30, "potato");
    potato["energy_kcal"] = 120.5;
    auto salad = annotation(50, 40, 20, 20, "lettuce salad");
    r = researcher("PUT", base + "/annotations",
                   Json{{"expected_version", 5}, {"initials", "JD"}, {"annotations", Json::array({potato, salad})}});
    ASSERT_EQ(r.status, 200);
    r = researcher("POST", base + "/finalize", Json{{"expected_version", 6}, {"initials", "JD"}});
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(body_of(r)["state"], "Finalized");
    EXPECT_EQ(code_of(researcher("PUT", base + "/annotations",
                                 Json{{"expected_version", 7}, {"initials", "JD"}, {"annotations", Json::array()}})),
              "ILLEGAL_TRANSITION");
    EXPECT_EQ(code_of(researcher("POST", base + "/finalize", Json{{"expected_version", 7}, {"initials", "JD"}})),
              "ILLEGAL_TRANSITION");

    const auto json = researcher("GET", "/api/v1/studies/demo/export", nullptr, {{"format", "json"}});
    const auto doc = body_of(json);
    ASSERT_EQ(doc["occasions"].size(), 1u);
    const auto& a = doc["occasions"][0]["researcher_annotations"][0];
    EXPECT_EQ(a["box"], (Json{{"x_px", 10}, {"y_px", 10}, {"w_px", 40}, {"h_px", 30}}));
    EXPECT_EQ(a["label"], "potato");
    EXPECT_EQ(a["food_code"], "58100100");
    EXPECT_EQ(a["initials"], "JD");
    EXPECT_EQ(a["energy_kcal"], 120.5);
    EXPECT_EQ(doc["manifest"]["annotation_count"], 2);
    EXPECT_EQ(doc["manifest"]["images"].size(), 2u);
    EXPECT_EQ(researcher("GET", "/api/v1/studies/demo/export", nullptr, {{"format", "json"}}).body, json.body);

    const auto csv = researcher("GET", "/api/v1/studies/demo/export", nullptr, {{"format", "csv"}});
    EXPECT_EQ(csv.content_type, "text/csv");
    EXPECT_EQ(std::count(csv.body.begin(), csv.body.end(), '\n'), 3);
    EXPECT_NE(csv.body.find(id + ",P01,JD,potato,58100100,10,10,40,30,120.5,Finalized\n"), std::string::npos);

    EXPECT_EQ(code_of(researcher("GET", "/api/v1/studies/demo/export", nullptr, {{"format", "xml"}})), "VALIDATION_FAILED");
    EXPECT_EQ(code_of(researcher("GET", "/api/v1/studies/other/export")), "NOT_FOUND");
}

TEST_F(Api, FoodSearchAndList) {
    const auto r = body_of(call("GET", "/api/v1/foods/search", kParticipantToken, nullptr, {{"q", "potato"}}));
    std::vector<std::string> names;
    for (const auto& item : r["results"]) names.push_back(item["name"]);
    EXPECT_EQ(names, (std::vector<std::string>{"potato", "potato wedges", "roast potato"}));
    EXPECT_EQ(r["results"][0]["code"], "58100100");
    EXPECT_EQ(r["results"][0]["display"], "potato (58100100)");

    const auto limited = body_of(researcher("GET", "/api/v1/foods/search", nullptr, {{"q", "potato"}, {"limit", "1"}}));
    EXPECT_EQ(limited["results"].size(), 1u);
    EXPECT_EQ(limited["total"], 3);
    EXPECT_EQ(code_of(researcher("GET", "/api/v1/foods/search", nullptr, {{"q", "a"}, {"limit", "x"}})), "VALIDATION_FAILED");
    EXPECT_EQ(body_of(researcher("GET", "/api/v1/foods/search", nullptr, {{"q", ""}}))["results"].size(), 0u);

    const auto list = body_of(call("GET", "/api/v1/foods", kParticipantToken));
    EXPECT_EQ(list["items"].size(), 14u);
    EXPECT_EQ(list["hash"].get<std::string>().size(), 64u);
    EXPECT_EQ(body_of(call("GET", "/api/v1/foods", kParticipantToken))["hash"], list["hash"]);
}

TEST_F(Api, ParticipantOccasionsAndBlobs) {
    auto p1 = parts("one.png");
    p1.metadata["captured_at"] = "2021-05-01T08:00:00Z";
    auto p2 = parts("two.png");
    p2.metadata["captured_at"] = "2021-05-01T19:00:00Z";
    const auto first = upload("one.png", kTwoFoods, &p1);
    const auto second = upload("two.png", kTwoFoods, &p2);
    const auto list = body_of(researcher("GET", "/api/v1/participants/P01/occasions"));
    ASSERT_EQ(list["occasions"].size(), 2u);
    EXPECT_EQ(list["occasions"][0]["occasion_id"], second);
    EXPECT_EQ(list["occasions"][1]["occasion_id"], first);
    EXPECT_EQ(list["occasions"][0]["state"], "Analyzed");
    EXPECT_TRUE(list["occasions"][0]["after"].contains("thumbnail_url"));
    EXPECT_EQ(body_of(researcher("GET", "/api/v1/participants/nobody/occasions"))["occasions"].size(), 0u);

    const std::string url = list["occasions"][0]["before"]["url"];
    const auto blob = call("GET", url, kParticipantToken);
    EXPECT_EQ(blob.status, 200);
    EXPECT_EQ(blob.content_type, "image/png");
    EXPECT_EQ(blob.body, *p2.before);
    EXPECT_EQ(code_of(call("GET", "/api/v1/blobs/" + std::string(64, '0'), kParticipantToken)), "NOT_FOUND");
}

struct AsyncApi : Api {
    AsyncApi() : Api(AnalysisMode::Async) {}
};

TEST_F(AsyncApi, PendingUntilWorkerRuns) {
    test::write_sidecar(config.sidecar_dir, "meal.png", kTwoFoods);
    const auto r = router->handle(test::upload_request(parts("meal.png")));
    ASSERT_EQ(r.status, 201);
    EXPECT_EQ(body_of(r)["analysis"], "scheduled");
    service->drain();
    const std::string id = body_of(r)["occasion_id"];
    EXPECT_EQ(body_of(call("GET", "/api/v1/occasions/" + id + "/predictions", kParticipantToken))["state"], "Analyzed");
}

struct ManualApi : Api {
    ManualApi() : Api(AnalysisMode::Manual) {}
};

TEST_F(ManualApi, PendingUntilProcessed) {
    const auto id = upload("meal.png");
    EXPECT_EQ(body_of(call("GET", "/api/v1/occasions/" + id + "/predictions", kParticipantToken))["status"], "pending");
    EXPECT_EQ(code_of(call("POST", "/api/v1/occasions/" + id + "/review", kParticipantToken,
                           Json{{"verdicts", Json::array()}})),
              "ILLEGAL_TRANSITION");
    EXPECT_EQ(researcher("POST", "/api/v1/occasions/" + id + "/process").status, 200);
    EXPECT_EQ(body_of(call("GET", "/api/v1/occasions/" + id + "/predictions", kParticipantToken))["status"], "ready");
}

TEST(Config, LoadsFileAndEnvOverrides) {
    auto c = load_config(test::data_dir() / "server.json");
    EXPECT_EQ(c.port, 8080);
    EXPECT_EQ(c.analyzer.kind, analysis::AnalyzerKind::SidecarStub);
    EXPECT_EQ(c.studies.at("demo"), test::data_dir() / "foods.csv");
    EXPECT_EQ(c.sidecar_dir, test::data_dir() / "sidecars");
    apply_env_overrides(c, [](const std::string& name) -> std::optional<std::string> {
        if (name == "TADA_PORT") return "9001";
        if (name == "TADA_ANALYZER") return "grid";
        if (name == "TADA_MAX_IMAGE_BYTES") return "1000";
        return std::nullopt;
    });
    EXPECT_EQ(c.port, 9001);
    EXPECT_EQ(c.analyzer.kind, analysis::AnalyzerKind::GridStub);
    EXPECT_EQ(c.max_image_bytes, 1000u);
}

TEST(Export, CsvQuoting) {
    EXPECT_EQ(csv_cell("plain"), "plain");
    EXPECT_EQ(csv_cell("rice, white"), "\"rice, white\"");
    EXPECT_EQ(csv_cell("say \"hi\""), "\"say \"\"hi\"\"\"");
}
