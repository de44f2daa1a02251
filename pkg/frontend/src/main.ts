import { SessionApi } from "./api.js";
import { ReviewConsole } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const console_ = new ReviewConsole(root, new SessionApi(""));
  void console_.refresh();
}
