#include "testlib.h"
#include <bits/stdc++.h>
using namespace std;
int main(int argc, char* argv[]) {
    registerValidation(argc, argv);
    int n = inf.readInt(1, 1000000, "n");
    inf.readSpace();
    int m = inf.readInt(1, 1000000, "m");
    inf.readEoln();
    vector<int> a = inf.readInts(n, 1, 1000000000, "a_i");
    inf.readEoln();
    vector<int> b = inf.readInts(m, 0, 29, "b_j");
    inf.readEoln();
    inf.readEof();
    return 0;
}
