class Helper {
  int reveal() {
    return secret();
  }
}
