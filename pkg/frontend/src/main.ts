import "./style.css";
import { ApiClient } from "./api";
import { mountApp } from "./app";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app element");

const app = mountApp(container, new ApiClient(""));
void app.init();
