#include <bits/stdc++.h>
using namespace std;

int main() {
    string s;
    while (cin >> s) cout << s << "\n";
    return 0;
}
