#pragma once

#include <cstdint>
#include <string>

#include "relayguard/digest.hpp"
#include "relayguard/trace.hpp"

namespace relayguard::testing {

/// Builder for hand-written transactions.
struct TxBuilder {
    Transaction tx;

    explicit TxBuilder(std::uint64_t id = 0) {
        tx.tx_id = id;
        tx.sender = "0x" + std::string(40, 'a');
        tx.gas_price = 50;
        tx.gas_used = 100000;
    }
    TxBuilder& at(std::int64_t t) { tx.timestamp = t; return *this; }
    TxBuilder& from(const std::string& s) { tx.sender = s; return *this; }
    TxBuilder& fee(std::uint64_t f) { tx.gas_price = f; return *this; }
    TxBuilder& gas(std::uint64_t g) { tx.gas_used = g; return *this; }
    TxBuilder& revert() { tx.receipt_status = ReceiptStatus::Revert; return *this; }
    TxBuilder& payload(std::string_view bytes) {
        tx.calldata_hash = sha256(bytes);
        tx.calldata_len = bytes.size();
        return *this;
    }
    Transaction build() const { return tx; }
    operator Transaction() const { return tx; }
};

inline std::string sender_of(int i) {
    std::string hex = std::to_string(i);
    return "0x" + std::string(40 - hex.size(), '0') + hex;
}

}  // namespace relayguard::testing
