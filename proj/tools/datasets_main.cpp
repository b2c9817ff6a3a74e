// Writes the bundled rule-generated datasets as CSV files, for feeding the
// main tool without any external downloads.

#include <iostream>
#include <string>

#include "rolltree/dataset.hpp"
#include "rolltree/datasets.hpp"

int main(int argc, char** argv) {
    std::string dir = ".";
    std::uint64_t seed = 1;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            dir = argv[++i];
        } else if (arg == "--seed" && i + 1 < argc) {
            seed = std::stoull(argv[++i]);
        } else {
            std::cerr << "usage: rolltree-datasets [--out DIR] [--seed N]\n";
            return arg == "--help" || arg == "-h" ? 0 : 1;
        }
    }
    try {
        rolltree::write_csv(rolltree::toy_dataset(), dir + "/toy.csv");
        rolltree::write_csv(rolltree::tictactoe_dataset(), dir + "/tictactoe.csv");
        rolltree::write_csv(rolltree::monks_dataset(1, seed), dir + "/monks1.csv");
        rolltree::write_csv(rolltree::monks_dataset(2, seed), dir + "/monks2.csv");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote toy.csv, tictactoe.csv, monks1.csv, monks2.csv to " << dir << "\n";
    return 0;
}
