#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    cin >> n;
    set<string> seen;
    for (int i = 0; i < n; i++) {
        string s;
        cin >> s;
        seen.insert(s);
    }
    cout << seen.size() << "\n";
}
