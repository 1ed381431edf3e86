#include "relayguard/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "relayguard/errors.hpp"

namespace relayguard {

namespace {

constexpr const char* kRequired[] = {"timestamp",      "from_address", "calldata",
                                     "gas_price",      "receipt_status", "receipt_gas_used"};

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
        if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
    }
    return fields;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
    Int out{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return out;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Trace parse_trace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::unordered_map<std::string, std::size_t> column;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        auto fields = split_csv(line);
        for (std::size_t i = 0; i < fields.size(); ++i) column.emplace(std::string(fields[i]), i);
        have_header = true;
    }
    if (!have_header) throw Error(Errc::EmptyTrace, "trace has no header and no rows");
    for (const char* name : kRequired) {
        if (!column.count(name)) throw Error(Errc::MissingColumn, std::string("missing column '") + name + "'");
    }
    const std::size_t c_ts = column["timestamp"], c_from = column["from_address"], c_data = column["calldata"],
                      c_fee = column["gas_price"], c_status = column["receipt_status"],
                      c_gas = column["receipt_gas_used"];
    std::optional<std::size_t> c_id, c_hash, c_len;
    if (auto it = column.find("tx_id"); it != column.end()) c_id = it->second;
    if (auto it = column.find("calldata_hash"); it != column.end()) c_hash = it->second;
    if (auto it = column.find("calldata_len"); it != column.end()) c_len = it->second;
    if (c_hash && !c_len) throw Error(Errc::MissingColumn, "missing column 'calldata_len'");

    std::size_t width = 0;
    for (const auto& [_, idx] : column) width = std::max(width, idx + 1);

    Trace trace;
    trace.source = TraceSource::CsvFile;
    std::unordered_set<std::uint64_t> seen_ids;
    std::uint64_t ordinal = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (fields.size() < width) malformed(line_no, "expected at least " + std::to_string(width) + " fields");

        Transaction tx;
        auto ts = parse_int<std::int64_t>(fields[c_ts]);
        if (!ts) malformed(line_no, "bad timestamp");
        tx.timestamp = *ts;

        tx.sender = lowercase(fields[c_from]);
        if (tx.sender.empty()) malformed(line_no, "empty from_address");

        auto fee = parse_int<std::uint64_t>(fields[c_fee]);
        if (!fee) malformed(line_no, "bad gas_price");
        tx.gas_price = *fee;

        const auto status = fields[c_status];
        if (status == "1") {
            tx.receipt_status = ReceiptStatus::Success;
        } else if (status == "0") {
            tx.receipt_status = ReceiptStatus::Revert;
        } else {
            malformed(line_no, "receipt_status must be 0 or 1");
        }

        auto gas = parse_int<std::uint64_t>(fields[c_gas]);
        if (!gas) malformed(line_no, "bad receipt_gas_used");
        tx.gas_used = *gas;

        const auto calldata = fields[c_data];
        if (!calldata.empty() && calldata != "0x") {
            auto bytes = decode_hex(calldata);
            if (!bytes) malformed(line_no, "calldata is not hex");
            tx.calldata_len = bytes->size();
            tx.calldata_hash = bytes->empty() ? empty_digest() : sha256(*bytes);
        } else if (c_hash && !fields[*c_hash].empty()) {
            auto digest = parse_digest(fields[*c_hash]);
            if (!digest) malformed(line_no, "calldata_hash is not a 32-byte hex digest");
            auto len = parse_int<std::uint64_t>(fields[*c_len]);
            if (!len) malformed(line_no, "bad calldata_len");
            tx.calldata_hash = *digest;
            tx.calldata_len = *len;
        } else {
            tx.calldata_hash = empty_digest();
            tx.calldata_len = 0;
        }

        if (c_id) {
            auto id = parse_int<std::uint64_t>(fields[*c_id]);
            if (!id) malformed(line_no, "bad tx_id");
            if (!seen_ids.insert(*id).second) malformed(line_no, "duplicate tx_id");
            tx.tx_id = *id;
        } else {
            tx.tx_id = ordinal;
        }
        ++ordinal;
        trace.transactions.push_back(std::move(tx));
    }
    if (trace.transactions.empty()) throw Error(Errc::EmptyTrace, "trace has no data rows");

    std::stable_sort(trace.transactions.begin(), trace.transactions.end(),
                     [](const Transaction& a, const Transaction& b) {
                         if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                         return a.tx_id < b.tx_id;
                     });
    return trace;
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MalformedRow, "cannot open trace file '" + path + "'");
    return parse_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace) {
    out << "timestamp,from_address,calldata,gas_price,receipt_status,receipt_gas_used,tx_id,calldata_hash,"
           "calldata_len\n";
    for (const auto& tx : trace.transactions) {
        out << tx.timestamp << ',' << tx.sender << ",," << tx.gas_price << ','
            << (tx.receipt_status == ReceiptStatus::Success ? '1' : '0') << ',' << tx.gas_used << ','
            << tx.tx_id << ",0x" << to_hex(tx.calldata_hash) << ',' << tx.calldata_len << '\n';
    }
}

std::uint64_t trace_fingerprint(const Trace& trace) {
    // FNV-1a over a fixed field serialization.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t n = trace.size();
    feed(&n, sizeof n);
    for (const auto& tx : trace.transactions) {
        feed(&tx.tx_id, sizeof tx.tx_id);
        feed(&tx.timestamp, sizeof tx.timestamp);
        feed(tx.sender.data(), tx.sender.size());
        feed(tx.calldata_hash.data(), tx.calldata_hash.size());
        feed(&tx.calldata_len, sizeof tx.calldata_len);
        feed(&tx.gas_price, sizeof tx.gas_price);
        const auto status = static_cast<std::uint8_t>(tx.receipt_status);
        feed(&status, 1);
        feed(&tx.gas_used, sizeof tx.gas_used);
    }
    return h;
}

}  // namespace relayguard
