#include "rolltree/datasets.hpp"

#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rolltree {

namespace {

RawDataset from_rows(std::vector<std::string> column_names,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::string& label_column) {
    RawDataset raw;
    raw.column_names = std::move(column_names);
    raw.label_column = label_column;
    raw.n_rows = rows.size();
    raw.columns.resize(raw.column_names.size());
    for (auto& col : raw.columns) col.reserve(rows.size());
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) raw.columns[c].push_back(row[c]);
    raw.numeric.resize(raw.column_names.size());
    raw.numeric_values.resize(raw.column_names.size());
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        bool all_numeric = !raw.columns[c].empty();
        std::vector<double> values;
        values.reserve(raw.columns[c].size());
        for (const auto& cell : raw.columns[c]) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) {
                    all_numeric = false;
                    break;
                }
                values.push_back(v);
            } catch (const std::exception&) {
                all_numeric = false;
                break;
            }
        }
        raw.numeric[c] = all_numeric;
        if (all_numeric) raw.numeric_values[c] = std::move(values);
    }
    return raw;
}

}  // namespace

RawDataset toy_dataset() {
    return from_rows({"x1", "x2", "x3", "y"},
                     {{"1", "0", "1", "A"},
                      {"1", "0", "0", "B"},
                      {"0", "0", "1", "B"},
                      {"1", "1", "1", "B"}},
                     "y");
}

RawDataset tictactoe_dataset() {
    // The eight winning lines over cells 0..8 laid out row-major.
    static constexpr std::array<std::array<int, 3>, 8> lines{{{0, 1, 2},
                                                              {3, 4, 5},
                                                              {6, 7, 8},
                                                              {0, 3, 6},
                                                              {1, 4, 7},
                                                              {2, 5, 8},
                                                              {0, 4, 8},
                                                              {2, 4, 6}}};
    const auto lines_won = [&](const std::array<char, 9>& cell, char player) {
        std::vector<int> won;
        for (int l = 0; l < 8; ++l)
            if (cell[lines[l][0]] == player && cell[lines[l][1]] == player &&
                cell[lines[l][2]] == player)
                won.push_back(l);
        return won;
    };
    // A winner's final move must be a cell shared by all of their completed
    // lines; otherwise the game would have ended a move earlier.
    const auto has_closing_move = [&](const std::array<char, 9>& cell, char player,
                                      const std::vector<int>& won) {
        for (int c = 0; c < 9; ++c) {
            if (cell[c] != player) continue;
            bool on_all = true;
            for (int l : won)
                if (lines[l][0] != c && lines[l][1] != c && lines[l][2] != c) {
                    on_all = false;
                    break;
                }
            if (on_all) return true;
        }
        return false;
    };

    std::vector<std::vector<std::string>> rows;
    std::array<char, 9> cell{};
    for (int code = 0; code < 19683; ++code) {
        int rest = code;
        int nx = 0, no = 0;
        for (int c = 0; c < 9; ++c) {
            const int digit = rest % 3;
            rest /= 3;
            cell[c] = digit == 0 ? 'x' : digit == 1 ? 'o' : 'b';
            nx += cell[c] == 'x';
            no += cell[c] == 'o';
        }
        if (nx != no && nx != no + 1) continue;
        const auto x_won = lines_won(cell, 'x');
        const auto o_won = lines_won(cell, 'o');
        if (!x_won.empty() && !o_won.empty()) continue;
        if (!x_won.empty()) {
            if (nx != no + 1 || !has_closing_move(cell, 'x', x_won)) continue;
        } else if (!o_won.empty()) {
            if (nx != no || !has_closing_move(cell, 'o', o_won)) continue;
        } else if (nx + no != 9) {
            continue;  // game still running
        }
        std::vector<std::string> row;
        row.reserve(10);
        for (int c = 0; c < 9; ++c) row.emplace_back(1, cell[c]);
        row.emplace_back(x_won.empty() ? "negative" : "positive");
        rows.push_back(std::move(row));
    }
    return from_rows({"tl", "tm", "tr", "ml", "mm", "mr", "bl", "bm", "br", "outcome"},
                     rows, "outcome");
}

RawDataset monks_dataset(int problem, std::uint64_t seed) {
    if (problem != 1 && problem != 2)
        throw std::invalid_argument("monks_dataset: problem must be 1 or 2");
    static constexpr std::array<int, 6> domain{3, 3, 2, 3, 4, 2};
    const auto label = [&](const std::array<int, 6>& a) {
        if (problem == 1) return (a[0] == a[1] || a[4] == 1) ? "1" : "0";
        int ones = 0;
        for (int v : a) ones += v == 1;
        return ones == 2 ? "1" : "0";
    };

    std::vector<std::array<int, 6>> points;
    std::array<int, 6> a{1, 1, 1, 1, 1, 1};
    for (;;) {
        points.push_back(a);
        int c = 5;
        while (c >= 0 && a[c] == domain[c]) {
            a[c] = 1;
            --c;
        }
        if (c < 0) break;
        ++a[c];
    }

    // The historical split trains on a sample of the domain and tests on all of
    // it; concatenating both yields the sampled points twice.
    const std::size_t sample_size = problem == 1 ? 124 : 169;
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng() % (i + 1)]);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(points.size() + sample_size);
    const auto emit = [&](const std::array<int, 6>& pt) {
        std::vector<std::string> row;
        row.reserve(7);
        for (int v : pt) row.push_back(std::to_string(v));
        row.emplace_back(label(pt));
        rows.push_back(std::move(row));
    };
    for (const auto& pt : points) emit(pt);
    for (std::size_t i = 0; i < sample_size; ++i) emit(points[order[i]]);

    return from_rows({"a1", "a2", "a3", "a4", "a5", "a6", "cls"}, rows, "cls");
}

}  // namespace rolltree
