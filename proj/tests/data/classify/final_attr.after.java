public class Shop {
  private final int count;

  public void run(int i, String name) {
    while (i < MAX_VALUE) {
      op.createPanel(i);
      i = i + 1;
    }
    if (name == null) {
      return;
    }
    log(name);
  }
}
