#include "tada/client/commands.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "tada/core/image.hpp"
#include "tada/core/validation.hpp"
#include "tada/food/database.hpp"

namespace tada::client {

namespace fs = std::filesystem;

namespace {

class BadMetadata : public Error {
public:
    BadMetadata(std::string field, const std::string& reason)
        : Error("bad metadata: " + field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

void check_image(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw Error("file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        probe_image(std::as_bytes(std::span(bytes.data(), bytes.size())));
    } catch (const DecodeError& e) {
        throw Error("cannot decode " + path.string() + ": " + e.what());
    }
}

Timestamp file_mtime(const fs::path& path) {
    const auto sys = std::chrono::file_clock::to_sys(fs::last_write_time(path));
    return Timestamp(std::chrono::time_point_cast<std::chrono::milliseconds>(sys));
}

Json build_metadata(const CaptureOptions& o, Io io) {
    Json j = Json::object();
    if (o.metadata_file) {
        std::ifstream in(*o.metadata_file);
        if (!in) throw Error("file not found: " + o.metadata_file->string());
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error&) {
            throw BadMetadata("metadata", "file is not valid JSON");
        }
        if (!j.is_object()) throw BadMetadata("metadata", "file must hold a JSON object");
    }

    if (o.time) {
        try {
            j["captured_at"] = Timestamp::parse(*o.time);
        } catch (const InvalidValue& e) {
            throw BadMetadata("captured_at", e.what());
        }
    }
    if (o.latitude || o.longitude) {
        if (!o.latitude) throw BadMetadata("gps.latitude", "required together with --lon");
        if (!o.longitude) throw BadMetadata("gps.longitude", "required together with --lat");
        j["gps"] = Json{{"latitude", *o.latitude}, {"longitude", *o.longitude}};
    }
    if (o.pose_angle) j["camera_pose_angle"] = *o.pose_angle;
    if (o.fiducial) j["fiducial_marker_present"] = true;
    if (o.scale) j["fiducial_scale_mm_per_px"] = *o.scale;
    for (const auto& kv : o.exif) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw BadMetadata("exif", "expected key=value, got '" + kv + "'");
        j["exif"][kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    const bool from_mtime = !j.contains("captured_at");
    if (from_mtime) j["captured_at"] = file_mtime(o.before);

    CaptureMetadata metadata;
    try {
        metadata = j.get<CaptureMetadata>();
    } catch (const InvalidValue& e) {
        throw BadMetadata(e.field(), e.what());
    } catch (const Json::exception& e) {
        throw BadMetadata("metadata", e.what());
    }
    if (const auto violations = validate_metadata(metadata); !violations.empty())
        throw BadMetadata(violations.front().field, violations.front().reason);
    if (from_mtime)
        io.err << "notice: --time not given; captured_at taken from the modification time of " << o.before.string()
               << " (" << metadata.captured_at.to_string() << ")\n";
    return Json(metadata);
}

/// Lines from the answers file when given, else the input stream. Each
/// prompt is written to the transcript; scripted answers are echoed.
class Prompter {
public:
    Prompter(Io io, const std::optional<fs::path>& answers) : io_(io) {
        if (answers) {
            file_.open(*answers);
            if (!file_) throw Error("file not found: " + answers->string());
            scripted_ = true;
        }
    }

    std::string ask(const std::string& prompt) {
        io_.out << prompt << std::flush;
        std::string line;
        std::istream& in = scripted_ ? static_cast<std::istream&>(file_) : io_.in;
        if (!std::getline(in, line)) throw Error("no answer for prompt '" + prompt + "'");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (scripted_) io_.out << line;
        io_.out << '\n';
        return std::string(food::trim(line));
    }

private:
    Io io_;
    std::ifstream file_;
    bool scripted_ = false;
};

std::optional<int> parse_int(std::string_view text) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::optional<PinLocation> parse_pin(std::string_view text) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    const auto x = parse_int(food::trim(text.substr(0, comma)));
    const auto y = parse_int(food::trim(text.substr(comma + 1)));
    if (!x || !y) return std::nullopt;
    return PinLocation{*x, *y};
}

struct MenuItem {
    std::string code;
    std::string name;
};

std::vector<MenuItem> menu_items(const SessionState& state) {
    std::vector<MenuItem> out;
    if (!state.foods) return out;
    for (const auto& item : state.foods->items)
        out.push_back({item.value("code", ""), item.value("name", "")});
    return out;
}

/// Menu number, exact list name (any case), or free text kept verbatim.
std::string pick_label(const std::string& answer, const std::vector<MenuItem>& menu) {
    if (const auto n = parse_int(answer); n && *n >= 1 && static_cast<std::size_t>(*n) <= menu.size())
        return menu[*n - 1].name;
    const auto lowered = food::to_lower_ascii(answer);
    for (const auto& item : menu)
        if (food::to_lower_ascii(item.name) == lowered) return item.name;
    return answer;
}

std::string fixed(double value, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << value;
    return s.str();
}

void print_error(Io io, const std::exception& e) { io.err << "error: " << e.what() << '\n'; }

} // namespace

int exit_code_for(const ServerError& error) noexcept {
    if (error.code() == "VALIDATION_FAILED" || error.code() == "PAYLOAD_TOO_LARGE") return kValidation;
    return kServerError;
}

int capture(LocalSession& session, const CaptureOptions& options, Io io) {
    auto& state = session.state();
    try {
        if (state.participant_id.empty()) throw Error("participant id not set; pass --participant");
        if (state.study_id.empty()) throw Error("study id not set; pass --study");
        check_image(options.before);
        check_image(options.after);
        auto metadata = build_metadata(options, io);
        const auto& draft = session.add_draft(options.before, options.after, std::move(metadata));
        session.save();
        io.out << "queued draft " << draft.local_id << " (" << draft.before_name << ", " << draft.after_name << ")\n";
        return kOk;
    } catch (const std::exception& e) {
        print_error(io, e);
        return kValidation;
    }
}

int sync(LocalSession& session, ApiClient& api, Io io) {
    auto& state = session.state();
    int code = kOk;
    std::size_t pending = 0;
    for (auto& draft : state.drafts) {
        if (draft.uploaded()) continue;
        ++pending;
        try {
            const auto result = api.upload(draft);
            draft.occasion_id = result.at("occasion_id").get<std::string>();
            draft.last_error.reset();
            io.out << draft.local_id << " -> occasion " << *draft.occasion_id << " ("
                   << (result.value("created", true) ? "created" : "already uploaded") << ", state "
                   << result.value("state", "?") << ")\n";
        } catch (const NetworkError& e) {
            draft.last_error = e.what();
            io.out << draft.local_id << " network error, kept in queue: " << e.what() << '\n';
            code = kNetwork;
        } catch (const ServerError& e) {
            draft.last_error = e.what();
            io.out << draft.local_id << " rejected, kept in queue: " << e.what() << '\n';
            if (code == kOk) code = exit_code_for(e);
        }
        session.save();
    }
    if (pending == 0) io.out << "nothing to sync\n";
    if (code == kOk && refresh_food_cache(session, api)) session.save();
    return code;
}

bool refresh_food_cache(LocalSession& session, ApiClient& api) {
    auto& state = session.state();
    try {
        std::map<std::string, std::string> query;
        if (!state.study_id.empty()) query["study_id"] = state.study_id;
        const auto list = api.get("/foods", query);
        const auto hash = list.at("hash").get<std::string>();
        const auto study = list.at("study_id").get<std::string>();
        if (state.foods && state.foods->hash == hash && state.foods->study_id == study) return true;
        state.foods = FoodCache{study, hash, list.at("items")};
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

int review(LocalSession& session, ApiClient& api, const ReviewOptions& options, Io io) {
    std::string occasion_id = options.target;
    if (const auto* draft = session.find_draft(options.target)) {
        if (!draft->uploaded()) {
            io.err << "error: draft " << draft->local_id << " is not uploaded yet; run sync first\n";
            return kValidation;
        }
        occasion_id = *draft->occasion_id;
    }

    try {
        // Poll until the analysis is in.
        const auto deadline = std::chrono::steady_clock::now() + options.timeout;
        Json results;
        while (true) {
            results = api.get("/occasions/" + occasion_id + "/predictions");
            const auto status = results.value("status", "pending");
            if (status == "ready") break;
            if (status == "failed") {
                const auto error = results.value("error", Json::object());
                io.err << "error: " << error.value("code", "ANALYSIS_FAILED") << ": " << error.value("message", "")
                       << '\n';
                return kServerError;
            }
            if (std::chrono::steady_clock::now() + options.poll_interval > deadline) {
                io.err << "error: timeout: occasion " << occasion_id << " not analyzed within "
                       << options.timeout.count() << " ms\n";
                return kTimeout;
            }
            std::this_thread::sleep_for(options.poll_interval);
        }
        const auto state_name = results.value("state", "");
        if (state_name != "Analyzed") {
            io.err << "error: ILLEGAL_TRANSITION: occasion " << occasion_id << " is " << state_name
                   << ", review needs Analyzed\n";
            return kServerError;
        }

        if (!session.state().foods || session.state().foods->items.empty()) refresh_food_cache(session, api);
        const auto menu = menu_items(session.state());
        const auto predictions = results.value("predictions", Json::array());

        Prompter prompter(io, options.answers);
        io.out << "occasion " << occasion_id << ": " << predictions.size() << " predicted food(s)\n";
        bool menu_shown = false;
        Json verdicts = Json::array();
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const auto& p = predictions[i];
            const auto id = p.at("prediction_id").get<std::string>();
            const auto label = p.at("label").get<std::string>();
            io.out << "  " << (i + 1) << ". [" << id << "] " << label << " at (" << p["pin"]["x_px"] << ", "
                   << p["pin"]["y_px"] << ") confidence " << fixed(p.value("confidence", 0.0), 2) << '\n';
            while (true) {
                const auto answer = food::to_lower_ascii(prompter.ask("     c=confirm r=relabel x=remove: "));
                if (answer == "c" || answer == "confirm") {
                    verdicts.push_back(Json{{"prediction_id", id}, {"verdict", "Confirmed"}});
                } else if (answer == "x" || answer == "remove") {
                    verdicts.push_back(Json{{"prediction_id", id}, {"verdict", "Removed"}});
                } else if (answer == "r" || answer == "relabel") {
                    if (!menu_shown) {
                        io.out << "     food list:\n";
                        for (std::size_t k = 0; k < menu.size(); ++k)
                            io.out << "     " << std::setw(4) << (k + 1) << ". " << menu[k].name << " (" << menu[k].code
                                   << ")\n";
                        menu_shown = true;
                    }
                    std::string chosen;
                    while (chosen.empty()) chosen = pick_label(prompter.ask("     new label (number or text): "), menu);
                    verdicts.push_back(Json{{"prediction_id", id}, {"verdict", "Relabeled"}, {"new_label", chosen}});
                } else {
                    continue;
                }
                break;
            }
        }

        Json additions = Json::array();
        while (true) {
            const auto label = prompter.ask("add food (label or number, blank to finish): ");
            if (label.empty()) break;
            const auto chosen = pick_label(label, menu);
            std::optional<PinLocation> pin;
            while (!pin) pin = parse_pin(prompter.ask("     pin x,y: "));
            additions.push_back(Json{{"label", chosen}, {"pin", *pin}});
        }

        for (const auto& v : verdicts) {
            io.out << "verdict " << v["prediction_id"].get<std::string>() << ' ' << v["verdict"].get<std::string>();
            if (v.contains("new_label")) io.out << ' ' << v["new_label"].get<std::string>();
            io.out << '\n';
        }
        for (const auto& a : additions)
            io.out << "addition " << a["label"].get<std::string>() << " at (" << a["pin"]["x_px"] << ", "
                   << a["pin"]["y_px"] << ")\n";

        const auto response =
            api.post("/occasions/" + occasion_id + "/review", Json{{"verdicts", verdicts}, {"additions", additions}});
        io.out << "review submitted; occasion " << occasion_id << " state " << response.value("state", "?")
               << " version " << response.value("version", 0) << '\n';
        session.save();
        return kOk;
    } catch (const NetworkError& e) {
        print_error(io, e);
        return kNetwork;
    } catch (const ServerError& e) {
        print_error(io, e);
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error(io, e);
        return kValidation;
    }
}

int status(LocalSession& session, ApiClient* api, Io io) {
    const auto& drafts = session.state().drafts;
    std::vector<std::string> states;
    bool server_ok = api != nullptr;
    if (!api && !drafts.empty()) io.err << "warning: no server configured; showing local drafts only\n";
    for (const auto& d : drafts) {
        if (!d.uploaded()) {
            states.push_back("queued");
            continue;
        }
        if (!server_ok) {
            states.push_back("uploaded");
            continue;
        }
        try {
            states.push_back(api->get("/occasions/" + *d.occasion_id + "/predictions").value("state", "?"));
        } catch (const NetworkError& e) {
            io.err << "warning: server unreachable (" << e.what() << "); showing local drafts only\n";
            server_ok = false;
            states.push_back("uploaded");
        } catch (const ServerError& e) {
            states.push_back(e.code());
        }
    }
    io.out << std::left << std::setw(8) << "DRAFT" << std::setw(34) << "OCCASION" << "STATE\n";
    for (std::size_t i = 0; i < drafts.size(); ++i)
        io.out << std::left << std::setw(8) << drafts[i].local_id << std::setw(34)
               << drafts[i].occasion_id.value_or("-") << states[i] << '\n';
    return kOk;
}

int foods(LocalSession& session, ApiClient* api, bool refresh, Io io) {
    auto& state = session.state();
    if ((refresh || !state.foods) && api) {
        if (refresh_food_cache(session, *api))
            session.save();
        else if (!state.foods) {
            io.err << "error: cannot fetch the food list from the server\n";
            return kNetwork;
        } else {
            io.err << "warning: refresh failed; showing cached list\n";
        }
    }
    if (!state.foods) {
        io.err << "error: no cached food list; run sync or foods --refresh\n";
        return kNetwork;
    }
    for (const auto& item : state.foods->items) io.out << item.value("code", "") << '\t' << item.value("name", "") << '\n';
    return kOk;
}

} // namespace tada::client
