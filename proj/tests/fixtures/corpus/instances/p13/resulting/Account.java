public class Account {
  private int balance = 100;

  class Audit {
    private int balance = 5;

    int report() {
      return balance;
    }

    int check() {
      return report();
    }
  }

  public int audit() {
    return new Audit().check();
  }
}
