// Writes the bundled prerequisite corpus as JSONL to a file or stdout.

#include <fstream>
#include <iostream>
#include <string>

#include "classim/curriculum.hpp"

int main(int argc, char** argv) {
    if (argc > 2) {
        std::cerr << "usage: gen_corpus [output.jsonl]\n";
        return 2;
    }
    if (argc == 2) {
        std::ofstream out(argv[1]);
        if (!out) {
            std::cerr << "cannot open " << argv[1] << " for writing\n";
            return 1;
        }
        classim::curriculum::write_bundled_corpus(out);
    } else {
        classim::curriculum::write_bundled_corpus(std::cout);
    }
    return 0;
}
