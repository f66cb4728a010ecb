// Registers the inspector panel in the browser devtools.

chrome.devtools.panels.create('2FA Inspector', '', 'panel.html')

export {}
